#![allow(dead_code)]

use adiabatica_core::{ComplexMatrix, Complex64, HamiltonianSpec};
use rand::Rng;

/// Hermitian matrix with entries of magnitude at most `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> ComplexMatrix<f64> {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.gen_range(-scale..scale), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// `H(t) = diag(levels) + Σ_j [B_j cos(jt) + C_j sin(jt)]`, period `2π`.
///
/// Levels are spaced by 1 and the perturbation is bounded by `0.3` in max
/// norm per harmonic pair, so adjacent gaps never close.
pub fn random_smooth_spec<R: Rng>(rng: &mut R, dim: usize) -> HamiltonianSpec<f64> {
    let levels: Vec<f64> = (0..dim).map(|k| k as f64 - (dim as f64 - 1.0) / 2.0).collect();
    let diag = ComplexMatrix::from_real_diagonal(&levels);
    let harmonics: Vec<(ComplexMatrix<f64>, ComplexMatrix<f64>)> = (0..2)
        .map(|_| (random_hermitian(rng, dim, 0.04), random_hermitian(rng, dim, 0.04)))
        .collect();
    HamiltonianSpec::new(dim, move |t: f64| {
        let mut h = diag.clone();
        for (j, (b, c)) in harmonics.iter().enumerate() {
            let (s, co) = ((j as f64 + 1.0) * t).sin_cos();
            h = &(&h + &b.scale(co)) + &c.scale(s);
        }
        h
    })
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = adiabatica_core::numerics::norm(&v);
    v.into_iter().map(|z| z / n).collect()
}
