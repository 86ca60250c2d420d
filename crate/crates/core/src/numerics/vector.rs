//! Helpers on complex column vectors stored as plain slices.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// `⟨a|b⟩ = Σ conj(a_i)·b_i`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Euclidean distance `‖a − b‖₂`.
pub fn distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr()).sqrt()
}

pub fn scale<T: Real>(a: &[Complex<T>], s: Complex<T>) -> Vec<Complex<T>> {
    a.iter().map(|&z| z * s).collect()
}

/// Unit basis vector `e_k` of length `dim`.
pub fn basis<T: Real>(dim: usize, k: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); dim];
    v[k] = Complex::new(T::one(), T::zero());
    v
}
