//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEigen<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        let v = &self.eigenvectors;
        &(v * &d) * &v.adjoint()
    }

    /// Smallest difference between consecutive eigenvalues; `+∞` for `N = 1`.
    pub fn min_gap(&self) -> T {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), |a, b| a.min(b))
    }
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out ascending; equal eigenvalues keep the order of the
/// diagonal position they converged to, so identical input always yields
/// identical output.
pub fn eig_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    h.ensure_hermitian()?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius();
    if n > 1 && scale > T::zero() {
        let tol = T::epsilon() * scale;
        let mut converged = false;
        for _ in 0..T::MAX_JACOBI_SWEEPS {
            if off_diagonal_norm(&a) <= tol {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > tol {
            return Err(Error::NoConvergence { sweeps: T::MAX_JACOBI_SWEEPS });
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep their column index order
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));

    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        eigenvectors.set_column(new, &v.column(old));
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eig_hermitian"));
    }
    Ok(HermitianEigen { eigenvalues, eigenvectors: eigenvectors.check_finite("eig_hermitian")? })
}

/// One two-sided complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `G = diag(1, e^{-iφ})·R(c, s)` on the `(p, q)` plane, where
/// `a_pq = |a_pq| e^{iφ}` and `R` is the real Jacobi rotation for the
/// phase-stripped 2×2 block. `a ← G†aG`, `v ← vG`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let n = a.dim();
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (mag + mag);
    let t = if theta.abs() > T::lit(1e150) {
        T::lit(0.5) / theta
    } else {
        let sign = if theta < T::zero() { -T::one() } else { T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    let g_pp = Complex::new(c, T::zero());
    let g_pq = Complex::new(s, T::zero());
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    // a ← a·G (columns p, q)
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * g_pp + aiq * g_qp;
        a[(i, q)] = aip * g_pq + aiq * g_qq;
    }
    // a ← G†·a (rows p, q)
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
        a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * g_pp + viq * g_qp;
        v[(i, q)] = vip * g_pq + viq * g_qq;
    }
}

/// `exp(−i·s·H)` for Hermitian `H`, assembled from the eigendecomposition.
pub fn exp_antihermitian<T: Real>(h: &ComplexMatrix<T>, s: T) -> Result<ComplexMatrix<T>> {
    let eig = eig_hermitian(h)?;
    Ok(exp_from_eigen(&eig, s))
}

/// `V·diag(e^{−i·s·λ})·V†` from a precomputed decomposition.
pub fn exp_from_eigen<T: Real>(eig: &HermitianEigen<T>, s: T) -> ComplexMatrix<T> {
    let n = eig.dim();
    let v = &eig.eigenvectors;
    let phases: Vec<Complex<T>> =
        eig.eigenvalues.iter().map(|&l| Complex::from_polar(T::one(), -(s * l))).collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::zero();
            for k in 0..n {
                acc += v[(i, k)] * phases[k] * v[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pauli;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Truncated Taylor series of exp(−i s H); independent of the eigensolver.
    fn taylor_exp(h: &ComplexMatrix<f64>, s: f64, terms: usize) -> ComplexMatrix<f64> {
        let gen = h.scale_complex(c(0.0, -s));
        let mut term = ComplexMatrix::identity(h.dim());
        let mut sum = term.clone();
        for k in 1..terms {
            term = (&term * &gen).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn diagonal_input_is_already_solved() {
        let h = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]);
        let eig = eig_hermitian(&h).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
        assert_eq!(eig.eigenvectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let h = ComplexMatrix::from_real_diagonal(&[3.0, -2.0, 0.5]);
        let eig = eig_hermitian(&h).unwrap();
        assert_eq!(eig.eigenvalues, vec![-2.0, 0.5, 3.0]);
        assert_eq!(eig.vector(0), vec![c(0., 0.), c(1., 0.), c(0., 0.)]);
    }

    #[test]
    fn pauli_x() {
        let eig = eig_hermitian(&pauli::x::<f64>()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (1, ∓1)/√2 up to a phase
        let lo = eig.vector(0);
        let hi = eig.vector(1);
        assert!((crate::numerics::inner(&[c(r, 0.), c(-r, 0.)], &lo).norm() - 1.0).abs() < 1e-14);
        assert!((crate::numerics::inner(&[c(r, 0.), c(r, 0.)], &hi).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_rows(&[&[c(0., 0.), c(1., 0.)], &[c(0., 0.), c(0., 0.)]]);
        assert!(matches!(eig_hermitian(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_three_level_reconstructs() {
        let h = ComplexMatrix::from_rows(&[
            &[c(1.0, 0.), c(0.3, -0.4), c(0.0, 0.2)],
            &[c(0.3, 0.4), c(-0.5, 0.), c(0.7, 0.1)],
            &[c(0.0, -0.2), c(0.7, -0.1), c(2.0, 0.)],
        ]);
        let eig = eig_hermitian(&h).unwrap();
        assert!(eig.reconstruct().max_distance(&h) < 1e-14);
        assert!(eig.eigenvectors.unitarity_defect() < 1e-14);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_eigenvalues_are_deterministic() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.eigenvalues, vec![0.0, 1.0, 1.0]);
        assert_eq!(a.vector(1), vec![c(1., 0.), c(0., 0.), c(0., 0.)]);
    }

    #[test]
    fn zero_matrix_exponential_is_identity() {
        let z = ComplexMatrix::<f64>::zeros(3);
        assert_eq!(exp_antihermitian(&z, 7.3).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn pauli_z_half_turn_is_minus_identity() {
        let u = exp_antihermitian(&pauli::z::<f64>(), std::f64::consts::PI).unwrap();
        let minus_one = ComplexMatrix::identity(2).scale(-1.0);
        assert!(u.max_distance(&minus_one) < 1e-15);
    }

    #[test]
    fn pauli_x_quarter_turn_matches_taylor_oracle() {
        let s = std::f64::consts::FRAC_PI_2;
        let u = exp_antihermitian(&pauli::x::<f64>(), s).unwrap();
        let oracle = taylor_exp(&pauli::x(), s, 32);
        assert!(u.max_distance(&oracle) <= 1e-12);
        let expected = pauli::x::<f64>().scale_complex(c(0., -1.));
        assert!(u.max_distance(&expected) <= 1e-12);
    }

    #[test]
    fn single_precision_works() {
        let eig = eig_hermitian(&pauli::x::<f32>()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-6);
        let u = exp_antihermitian(&pauli::y::<f32>(), 0.3).unwrap();
        assert!(u.unitarity_defect() < 1e-6);
    }
}
