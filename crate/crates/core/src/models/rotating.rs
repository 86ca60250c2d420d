//! Spin in a magnetic field of constant magnitude precessing about the z axis.
//!
//! `H(t) = −μB·(B̂(t)·σ)` with `B̂ = (sinθ cos ωt, sinθ sin ωt, cosθ)`. Level
//! `Plus` is aligned with the field and carries energy `−μB`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{pauli, ComplexMatrix};
use crate::propagate::State;
use crate::scalar::Real;
use crate::spectral::{AnalyticFrame, HamiltonianSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatingModelParams<T> {
    pub mu_b: T,
    pub theta: T,
    pub omega: T,
}

/// The two levels; `Plus` sits at grid level index 0 (lower energy).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(Spin::Plus),
            1 => Some(Spin::Minus),
            _ => None,
        }
    }

    fn sign<T: Real>(self) -> T {
        match self {
            Spin::Plus => T::one(),
            Spin::Minus => -T::one(),
        }
    }
}

impl<T: Real> RotatingModelParams<T> {
    pub fn new(mu_b: T, theta: T, omega: T) -> Result<Self> {
        let mut bad = Vec::new();
        if !(mu_b.is_finite() && mu_b > T::zero()) {
            bad.push("mu_B > 0");
        }
        if !(theta.is_finite() && theta > T::zero() && theta < T::PI()) {
            bad.push("theta in (0, π)");
        }
        if !(omega.is_finite() && omega != T::zero()) {
            bad.push("omega ≠ 0");
        }
        if bad.is_empty() {
            Ok(Self { mu_b, theta, omega })
        } else {
            Err(Error::InvalidParameter(bad.join("; ")))
        }
    }

    pub fn period(&self) -> T {
        T::TAU() / self.omega.abs()
    }

    /// Tilt of the exact cyclic states away from the field,
    /// `tan α = ω sinθ / (2μB + ω cosθ)`, on the branch with `α → 0` as `ω → 0`.
    pub fn alpha(&self) -> T {
        let (s, c) = self.theta.sin_cos();
        (self.omega * s).atan2(T::lit(2.0) * self.mu_b + self.omega * c)
    }

    pub fn field_direction(&self, t: T) -> [T; 3] {
        let (s, c) = self.theta.sin_cos();
        let (sp, cp) = (self.omega * t).sin_cos();
        [s * cp, s * sp, c]
    }

    /// `ψ(t) = exp(−iλt)·w(t)`; returns `λ` for `level`.
    pub fn quasi_energy(&self, level: Spin) -> T {
        let sign = level.sign::<T>();
        let alpha = self.alpha();
        let half = T::lit(0.5);
        -sign * self.mu_b * alpha.cos() - half * self.omega * (T::one() + sign * (self.theta - alpha).cos())
    }
}

/// `(v_+, v_−)` columns at polar angle `theta` and azimuth `ωt`.
fn spinors<T: Real>(theta: T, phase: Complex<T>) -> ComplexMatrix<T> {
    let half = theta * T::lit(0.5);
    let (s, c) = half.sin_cos();
    ComplexMatrix::from_columns(&[
        vec![phase.scale(c), Complex::new(s, T::zero())],
        vec![phase.scale(s), Complex::new(-c, T::zero())],
    ])
}

pub fn rotating_model<T: Real>(params: &RotatingModelParams<T>) -> HamiltonianSpec<T> {
    let p = *params;
    let frame_params = *params;
    HamiltonianSpec::new(2, move |t| {
        let [x, y, z] = p.field_direction(t);
        pauli::dot([-p.mu_b * x, -p.mu_b * y, -p.mu_b * z])
    })
    .with_analytic_frame(move |t| {
        let p = frame_params;
        let phase = Complex::from_polar(T::one(), -p.omega * t);
        let vectors = spinors(p.theta, phase);
        let (s, c) = (p.theta * T::lit(0.5)).sin_cos();
        let d = Complex::new(T::zero(), -p.omega) * phase;
        let zero = Complex::new(T::zero(), T::zero());
        let derivatives = ComplexMatrix::from_columns(&[vec![d.scale(c), zero], vec![d.scale(s), zero]]);
        AnalyticFrame { energies: vec![-p.mu_b, p.mu_b], vectors, derivatives }
    })
}

/// `w(t)·exp(−iλt)`: the exact cyclic solution continuously connected to
/// `level` as `ω → 0`.
pub fn rotating_exact_solution<T: Real>(params: &RotatingModelParams<T>, level: Spin, t: T) -> State<T> {
    let w = spinors(params.theta - params.alpha(), Complex::from_polar(T::one(), -params.omega * t));
    let f = Complex::from_polar(T::one(), -params.quasi_energy(level) * t);
    w.column(level.index()).into_iter().map(|z| z * f).collect()
}

/// `∂_t` of [`rotating_exact_solution`].
pub fn rotating_exact_derivative<T: Real>(params: &RotatingModelParams<T>, level: Spin, t: T) -> State<T> {
    let psi = rotating_exact_solution(params, level, t);
    let lambda = params.quasi_energy(level);
    let i = Complex::new(T::zero(), T::one());
    vec![-i * (params.omega + lambda) * psi[0], -i * lambda * psi[1]]
}

/// Phases of the exact cyclic solution over one period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePhases<T> {
    /// `−∫⟨ψ|H|ψ⟩dt = ±μB cosα·T`
    pub dynamical: T,
    /// `(ωT/2)(1 ± cos(θ−α))`
    pub geometric: T,
    /// `dynamical + geometric = −λT`
    pub total: T,
}

pub fn exact_cycle_phases<T: Real>(params: &RotatingModelParams<T>, level: Spin) -> CyclePhases<T> {
    let sign = level.sign::<T>();
    let period = params.period();
    let alpha = params.alpha();
    let dynamical = sign * params.mu_b * alpha.cos() * period;
    let geometric = params.omega * period * T::lit(0.5) * (T::one() + sign * (params.theta - alpha).cos());
    CyclePhases { dynamical, geometric, total: dynamical + geometric }
}

/// `points` values spaced evenly in `log10` between `min` and `max`.
pub fn log_spaced<T: Real>(min: T, max: T, points: usize) -> Result<Vec<T>> {
    if !(min > T::zero() && max > min && min.is_finite() && max.is_finite()) || points < 2 {
        return Err(Error::InvalidParameter("log range needs 0 < min < max and ≥ 2 points".into()));
    }
    let (a, b) = (min.log10(), max.log10());
    let last = T::from_count(points - 1);
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                max
            } else {
                T::lit(10.0).powf(a + (b - a) * T::from_count(k) / last)
            }
        })
        .collect())
}

/// One row of the adiabatic-to-sudden interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    /// `ω/μB`
    pub ratio: T,
    pub alpha: T,
    /// Geometric phase per period of the exact `Plus` solution, unwrapped.
    pub geometric: T,
    /// `geometric` reduced to `[0, 2π)`.
    pub geometric_wrapped: T,
    /// Distance on the circle to the adiabatic value `π(1+cosθ)`.
    pub from_adiabatic: T,
    /// Distance on the circle to 0.
    pub from_trivial: T,
}

/// Per-period geometric phase of the `Plus` level at `μB = 1` and
/// `ω = ratio`.
pub fn geometric_phase_point<T: Real>(theta: T, ratio: T) -> Result<SweepPoint<T>> {
    let p = RotatingModelParams::new(T::one(), theta, ratio)?;
    let geometric = exact_cycle_phases(&p, Spin::Plus).geometric;
    let berry = T::PI() * (T::one() + theta.cos());
    Ok(SweepPoint {
        ratio,
        alpha: p.alpha(),
        geometric,
        geometric_wrapped: crate::phases::wrap_phase(geometric),
        from_adiabatic: crate::phases::phase_distance(geometric, berry),
        from_trivial: crate::phases::phase_distance(geometric, T::zero()),
    })
}

pub fn geometric_phase_sweep<T: Real>(theta: T, ratio_min: T, ratio_max: T, points: usize) -> Result<Vec<SweepPoint<T>>> {
    log_spaced(ratio_min, ratio_max, points)?
        .into_iter()
        .map(|r| geometric_phase_point(theta, r))
        .collect()
}
