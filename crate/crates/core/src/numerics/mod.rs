//! Dense complex linear algebra for small Hermitian problems.

mod eigen;
mod matrix;
mod vector;

pub use eigen::{eig_hermitian, exp_antihermitian, exp_from_eigen, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use vector::{basis, distance, inner, norm, scale};

/// Pauli matrices.
pub mod pauli {
    use num_complex::Complex;

    use super::ComplexMatrix;
    use crate::scalar::Real;

    fn m<T: Real>(a: [(f64, f64); 4]) -> ComplexMatrix<T> {
        ComplexMatrix::from_row_major(
            2,
            a.iter().map(|&(re, im)| Complex::new(T::lit(re), T::lit(im))).collect(),
        )
    }

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        m([(0., 0.), (1., 0.), (1., 0.), (0., 0.)])
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        m([(0., 0.), (0., -1.), (0., 1.), (0., 0.)])
    }

    pub fn z<T: Real>() -> ComplexMatrix<T> {
        m([(1., 0.), (0., 0.), (0., 0.), (-1., 0.)])
    }

    /// `r·σ = r_x σ_x + r_y σ_y + r_z σ_z`.
    pub fn dot<T: Real>(r: [T; 3]) -> ComplexMatrix<T> {
        let [rx, ry, rz] = r;
        ComplexMatrix::from_row_major(
            2,
            vec![
                Complex::new(rz, T::zero()),
                Complex::new(rx, -ry),
                Complex::new(rx, ry),
                Complex::new(-rz, T::zero()),
            ],
        )
    }
}
