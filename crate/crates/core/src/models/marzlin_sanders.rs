//! The two constructions of the Marzlin–Sanders counterexample: the barred
//! Hamiltonian `H̄ = −U†HU` built from a base model's own evolution, and the
//! two-level model driven by `H = R(t)·σ` together with the candidate
//! evolution operator it was introduced with.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{exp_antihermitian, pauli, ComplexMatrix};
use crate::propagate::{midpoint_step, State};
use crate::scalar::Real;
use crate::spectral::{cumulative_trapezoid, AnalyticFrame, ConnectionMatrix, FrameTrajectory, HamiltonianSpec, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsSecondModelParams<T> {
    pub omega_0: T,
    pub tau: T,
}

impl<T: Real> MsSecondModelParams<T> {
    pub fn new(omega_0: T, tau: T) -> Result<Self> {
        let mut bad = Vec::new();
        if !(omega_0.is_finite() && omega_0 > T::zero()) {
            bad.push("omega0 > 0");
        }
        if !(tau.is_finite() && tau > T::zero()) {
            bad.push("tau > 0");
        }
        if bad.is_empty() {
            Ok(Self { omega_0, tau })
        } else {
            Err(Error::InvalidParameter(bad.join("; ")))
        }
    }

    /// `ω₀ = 2nω` with `ω = 2π/τ`.
    pub fn from_regime(tau: T, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n ≥ 1".into()));
        }
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::InvalidParameter("tau > 0".into()));
        }
        Self::new(T::lit(2.0 * f64::from(n)) * T::TAU() / tau, tau)
    }

    pub fn omega(&self) -> T {
        T::TAU() / self.tau
    }

    /// `R(t)` and `Ṙ(t)`.
    pub fn field(&self, t: T) -> ([T; 3], [T; 3]) {
        let (w0, w) = (self.omega_0, self.omega());
        let half = T::lit(0.5);
        let (sw, cw) = (w * t).sin_cos();
        let (s2, c2) = (T::lit(2.0) * w0 * t).sin_cos();
        let s1 = (w0 * t).sin();
        let r = [w0 * cw - half * w * sw * s2, w0 * sw + half * w * cw * s2, w * s1 * s1];
        let dr = [
            -w0 * w * sw - half * w * w * cw * s2 - w * w0 * sw * c2,
            w0 * w * cw - half * w * w * sw * s2 + w * w0 * cw * c2,
            w * w0 * s2,
        ];
        (r, dr)
    }

    /// `(Θ, φ)` of `R(t)` and their time derivatives; `φ` is unwrapped
    /// continuously in `t`.
    pub fn angles(&self, t: T) -> Angles<T> {
        let ([rx, ry, rz], [dx, dy, dz]) = self.field(t);
        let rho2 = rx * rx + ry * ry;
        let rho = rho2.sqrt();
        let modulus2 = rho2 + rz * rz;
        let drho = (rx * dx + ry * dy) / rho;
        let theta = rho.atan2(rz);
        // R_x ± i R_y = ρ e^{±iφ} stays within a quarter turn of e^{±iωt}
        let w_t = self.omega() * t;
        let (sw, cw) = w_t.sin_cos();
        let relative = (cw * ry - sw * rx).atan2(cw * rx + sw * ry);
        Angles {
            modulus: modulus2.sqrt(),
            theta,
            phi: w_t + relative,
            theta_dot: (rz * drho - rho * dz) / modulus2,
            phi_dot: (rx * dy - ry * dx) / rho2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angles<T> {
    pub modulus: T,
    pub theta: T,
    pub phi: T,
    pub theta_dot: T,
    pub phi_dot: T,
}

/// `H(t) = R(t)·σ`. Levels are ordered by energy: index 0 is `v_−`
/// (`E = −|R|`), index 1 is `v_+` (`E = +|R|`).
pub fn ms_second_model<T: Real>(params: &MsSecondModelParams<T>) -> HamiltonianSpec<T> {
    let p = *params;
    let q = *params;
    HamiltonianSpec::new(2, move |t| pauli::dot(p.field(t).0)).with_analytic_frame(move |t| {
        let a = q.angles(t);
        let half = T::lit(0.5);
        let (s, c) = (a.theta * half).sin_cos();
        let e = Complex::from_polar(T::one(), -a.phi);
        let i = Complex::new(T::zero(), T::one());
        let hd = a.theta_dot * half;
        let re = |x: T| Complex::new(x, T::zero());
        let plus = vec![e.scale(c), re(s)];
        let minus = vec![e.scale(s), re(-c)];
        let d_plus = vec![(re(-hd * s) - i.scale(a.phi_dot * c)) * e, re(hd * c)];
        let d_minus = vec![(re(hd * c) - i.scale(a.phi_dot * s)) * e, re(hd * s)];
        AnalyticFrame {
            energies: vec![-a.modulus, a.modulus],
            vectors: ComplexMatrix::from_columns(&[minus, plus]),
            derivatives: ComplexMatrix::from_columns(&[d_minus, d_plus]),
        }
    })
}

/// Axis of the candidate evolution operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateDirection {
    /// `n(s) = (cos 2πs/τ, sin 2πs/τ, 0)`
    Rotating,
    /// `n = (1, 0, 0)`
    Constant,
}

/// `U(t2, t1) = exp{−iω₀ s n(s)·σ}` with `s = t2 − t1`.
pub fn ms_candidate_evolution<T: Real>(
    params: &MsSecondModelParams<T>,
    direction: CandidateDirection,
    t2: T,
    t1: T,
) -> ComplexMatrix<T> {
    let s = t2 - t1;
    let n = match direction {
        CandidateDirection::Rotating => {
            let (sn, cn) = (params.omega() * s).sin_cos();
            [cn, sn, T::zero()]
        }
        CandidateDirection::Constant => [T::one(), T::zero(), T::zero()],
    };
    let (sa, ca) = (params.omega_0 * s).sin_cos();
    let axis = pauli::dot(n).scale_complex(Complex::new(T::zero(), -sa));
    &ComplexMatrix::identity(2).scale(ca) + &axis
}

/// Base evolution `U(t, t_start)` sampled every half step of the outer grid.
struct PropagatorTable<T> {
    base: HamiltonianSpec<T>,
    t_start: T,
    half_step: T,
    samples: Vec<ComplexMatrix<T>>,
}

impl<T: Real> PropagatorTable<T> {
    fn at(&self, t: T) -> ComplexMatrix<T> {
        let x = (t - self.t_start) / self.half_step;
        let last = self.samples.len() - 1;
        let nearest = x.round();
        if (x - nearest).abs() <= T::lit(1e-9) && nearest >= T::zero() && nearest <= T::from_count(last) {
            return self.samples[nearest.to_usize().unwrap_or(0)].clone();
        }
        let j = x.floor().max(T::zero()).min(T::from_count(last)).to_usize().unwrap_or(0);
        let s = self.t_start + T::from_count(j) * self.half_step;
        let h = self.base.evaluate((s + t) * T::lit(0.5));
        match exp_antihermitian(&h, t - s) {
            Ok(step) => &step * &self.samples[j],
            Err(_) => ComplexMatrix::identity(h.dim()).scale(T::nan()),
        }
    }
}

/// `H̄(t) = −U(t)†H(t)U(t)` where `U` is the base model's own evolution.
#[derive(Clone)]
pub struct BarredModel<T> {
    grid: TimeGrid<T>,
    table: Arc<PropagatorTable<T>>,
    spec: HamiltonianSpec<T>,
}

impl<T> fmt::Debug for BarredModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BarredModel").field("samples", &self.table.samples.len()).finish()
    }
}

/// Builds the barred model of `base` for use on `grid`.
///
/// `U` is stored at every half step of `grid`, each half step being covered
/// by `refine` midpoint substeps; times off the table advance one midpoint
/// step from the nearest earlier sample. When the base carries analytic
/// frames the barred model gets `ū_n = U†v_n` with energy `−E_n`, keeping
/// the base level indices.
pub fn barred_model<T: Real>(base: &HamiltonianSpec<T>, grid: &TimeGrid<T>, refine: usize) -> Result<BarredModel<T>> {
    if refine == 0 {
        return Err(Error::InvalidParameter("refine ≥ 1".into()));
    }
    let fine = TimeGrid::new(grid.t_start, grid.t_end, 2 * grid.steps * refine)?;
    let mut u = ComplexMatrix::identity(base.dim());
    let mut samples = Vec::with_capacity(2 * grid.steps + 1);
    samples.push(u.clone());
    for k in 0..fine.steps {
        u = &midpoint_step(base, &fine, k)? * &u;
        if (k + 1) % refine == 0 {
            samples.push(u.clone());
        }
    }
    let table = Arc::new(PropagatorTable {
        base: base.clone(),
        t_start: grid.t_start,
        half_step: grid.dt() * T::lit(0.5),
        samples,
    });

    let h_table = table.clone();
    let h_base = base.clone();
    let mut spec = HamiltonianSpec::new(base.dim(), move |t| {
        let u = h_table.at(t);
        -(&(&u.adjoint() * &h_base.evaluate(t)) * &u)
    });
    if base.has_analytic_frame() {
        let f_table = table.clone();
        let f_base = base.clone();
        spec = spec.with_analytic_frame(move |t| {
            let u_dag = f_table.at(t).adjoint();
            let f = f_base.analytic_frame(t).expect("base frame");
            let n = f.energies.len();
            let mut moving = f.derivatives.clone();
            for m in 0..n {
                let ie = Complex::new(T::zero(), f.energies[m]);
                for r in 0..n {
                    moving[(r, m)] += ie * f.vectors[(r, m)];
                }
            }
            AnalyticFrame {
                energies: f.energies.iter().map(|&e| -e).collect(),
                vectors: &u_dag * &f.vectors,
                derivatives: &u_dag * &moving,
            }
        });
    }
    Ok(BarredModel { grid: *grid, table, spec })
}

impl<T: Real> BarredModel<T> {
    pub fn spec(&self) -> &HamiltonianSpec<T> {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    /// Base evolution `U(t, t_start)`.
    pub fn propagator(&self, t: T) -> ComplexMatrix<T> {
        self.table.at(t)
    }

    /// `U(t_k)†·initial` at every grid point: the exact barred evolution of
    /// `initial`, since `i∂_t U† = H̄·U†`.
    pub fn exact_states(&self, initial: &[Complex<T>]) -> Result<Vec<State<T>>> {
        if initial.len() != self.spec.dim() {
            return Err(Error::DimensionMismatch { expected: self.spec.dim(), found: initial.len() });
        }
        Ok((0..self.grid.len())
            .map(|k| self.table.samples[2 * k].adjoint().mul_vec(initial))
            .collect())
    }
}

/// `v_n(t_start)·exp{i∫(E_n − A_nn)dt}` over the whole grid, computed in the
/// base model's frames: the one-cycle form of the barred amplitude, the
/// adiabatic expression of the base with the sign of the exponent reversed.
pub fn reversed_sign_cycle_state<T: Real>(
    frames: &FrameTrajectory<T>,
    conn: &ConnectionMatrix<T>,
    level: usize,
) -> Result<State<T>> {
    if frames.grid != conn.grid {
        return Err(Error::GridMismatch);
    }
    if level >= frames.dim() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    let dt = frames.grid.dt();
    let integrand: Vec<T> = frames
        .level_energies(level)
        .iter()
        .zip(conn.diagonal(level))
        .map(|(&e, a)| e - a)
        .collect();
    let phase = *cumulative_trapezoid(&integrand, dt).last().expect("non-empty grid");
    let f = Complex::from_polar(T::one(), phase);
    Ok(frames.vector(0, level).into_iter().map(|z| z * f).collect())
}
