//! Dynamical/geometric phase bookkeeping, holonomies, parallel transport and
//! the local rephasing symmetry of the instantaneous basis.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::effective::build_effective;
use crate::error::{Error, Result};
use crate::numerics::{distance, inner, norm, ComplexMatrix};
use crate::propagate::{coefficient_propagate, evolve_state, propagate, reconstruct};
use crate::scalar::Real;
use crate::spectral::{
    build_frames, connection, cumulative_trapezoid, ConnectionMatrix, FrameTrajectory, Gauge, HamiltonianSpec,
    TimeGrid,
};

/// Phase integrals of one level over the grid, in radians.
///
/// `geometric` depends on the gauge of the frames it was computed in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSplit<T> {
    pub level: usize,
    /// `∫E_n dt`
    pub dynamical: T,
    /// `∫A_nn dt`
    pub geometric: T,
    /// `dynamical − geometric`
    pub total: T,
    pub gauge: Gauge,
}

fn check_level<T: Real>(frames: &FrameTrajectory<T>, level: usize) -> Result<()> {
    if level >= frames.dim() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    Ok(())
}

fn trapezoid_range<T: Real>(values: &[T], dt: T) -> T {
    values.windows(2).fold(T::zero(), |acc, w| acc + (w[0] + w[1]) * T::lit(0.5) * dt)
}

pub fn phase_split<T: Real>(frames: &FrameTrajectory<T>, conn: &ConnectionMatrix<T>, level: usize) -> Result<PhaseSplit<T>> {
    phase_split_range(frames, conn, level, 0, frames.grid.steps)
}

/// Phase split restricted to grid indices `first..=last`.
pub fn phase_split_range<T: Real>(
    frames: &FrameTrajectory<T>,
    conn: &ConnectionMatrix<T>,
    level: usize,
    first: usize,
    last: usize,
) -> Result<PhaseSplit<T>> {
    if frames.grid != conn.grid {
        return Err(Error::GridMismatch);
    }
    check_level(frames, level)?;
    if first > last || last > frames.grid.steps {
        return Err(Error::InvalidParameter(format!("index range {first}..={last} out of grid")));
    }
    let dt = frames.grid.dt();
    let energies = frames.level_energies(level);
    let diag = conn.diagonal(level);
    let dynamical = trapezoid_range(&energies[first..=last], dt);
    let geometric = trapezoid_range(&diag[first..=last], dt);
    Ok(PhaseSplit { level, dynamical, geometric, total: dynamical - geometric, gauge: frames.gauge })
}

/// `v_n(0)†·v_n(T)·exp{i∫₀ᵀ A_nn dt}`; gauge invariant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Holonomy<T> {
    pub level: usize,
    pub re: T,
    pub im: T,
    /// False when `H(T)` differs from `H(0)`; the value is then not a
    /// closed-loop holonomy.
    pub cyclic: bool,
    pub endpoint_mismatch: T,
}

impl<T: Real> Holonomy<T> {
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    /// Phase angle in `(−π, π]`.
    pub fn phase(&self) -> T {
        self.value().arg()
    }
}

pub fn holonomy<T: Real>(frames: &FrameTrajectory<T>, conn: &ConnectionMatrix<T>, level: usize) -> Result<Holonomy<T>> {
    let split = phase_split(frames, conn, level)?;
    let last = frames.grid.steps;
    let overlap = inner(&frames.vector(0, level), &frames.vector(last, level));
    let value = overlap * Complex::from_polar(T::one(), split.geometric);
    Ok(Holonomy {
        level,
        re: value.re,
        im: value.im,
        cyclic: frames.is_cyclic(),
        endpoint_mismatch: frames.endpoint_mismatch,
    })
}

/// Frames rephased to satisfy `⟨ṽ_n|∂_t ṽ_n⟩ = 0`.
#[derive(Clone, Debug)]
pub struct ParallelTransport<T> {
    pub frames: FrameTrajectory<T>,
    /// `max_{t,n} |⟨ṽ_n|∂_t ṽ_n⟩|` measured with second-order differences.
    pub residual: T,
}

/// `ṽ_n(t) = v_n(t)·exp{i∫₀ᵗ A_nn dt'}`.
pub fn parallel_transport<T: Real>(frames: &FrameTrajectory<T>, conn: &ConnectionMatrix<T>) -> Result<ParallelTransport<T>> {
    if frames.grid != conn.grid {
        return Err(Error::GridMismatch);
    }
    let n = frames.dim();
    let dt = frames.grid.dt();
    let phases: Vec<Vec<T>> = (0..n).map(|level| cumulative_trapezoid(&conn.diagonal(level), dt)).collect();
    let vectors: Vec<ComplexMatrix<T>> = frames
        .vectors
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut out = v.clone();
            for (level, ph) in phases.iter().enumerate() {
                let f = Complex::from_polar(T::one(), ph[k]);
                let col: Vec<_> = v.column(level).into_iter().map(|z| z * f).collect();
                out.set_column(level, &col);
            }
            out
        })
        .collect();
    let transported = FrameTrajectory {
        vectors,
        derivatives: None,
        gauge: Gauge::Transformed,
        ..frames.clone()
    };
    let residual = if frames.grid.steps >= 2 {
        let fd = crate::spectral::finite_difference_connection(&transported)?;
        (0..n).flat_map(|l| fd.matrices.iter().map(move |a| a[(l, l)].norm())).fold(T::zero(), T::max)
    } else {
        T::zero()
    };
    Ok(ParallelTransport { frames: transported, residual })
}

/// A smooth phase function `α(t)` with its derivative.
#[derive(Clone)]
pub struct PhaseFunction<T> {
    value: Arc<dyn Fn(T) -> T + Send + Sync>,
    derivative: Arc<dyn Fn(T) -> T + Send + Sync>,
}

impl<T> fmt::Debug for PhaseFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PhaseFunction")
    }
}

impl<T: Real> PhaseFunction<T> {
    pub fn new(
        value: impl Fn(T) -> T + Send + Sync + 'static,
        derivative: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), derivative: Arc::new(derivative) }
    }

    pub fn constant(a: T) -> Self {
        Self::new(move |_| a, |_| T::zero())
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// `c0 + Σ_j [a_j sin(jωt) + b_j cos(jωt)] + winding·ω·t`.
    pub fn fourier(c0: T, sin: Vec<T>, cos: Vec<T>, omega: T, winding: T) -> Self {
        let (s1, c1) = (sin.clone(), cos.clone());
        Self::new(
            move |t| {
                let mut acc = c0 + winding * omega * t;
                for (j, (&a, &b)) in s1.iter().zip(&c1).enumerate() {
                    let x = T::from_count(j + 1) * omega * t;
                    acc += a * x.sin() + b * x.cos();
                }
                acc
            },
            move |t| {
                let mut acc = winding * omega;
                for (j, (&a, &b)) in sin.iter().zip(&cos).enumerate() {
                    let jw = T::from_count(j + 1) * omega;
                    acc += jw * (a * (jw * t).cos() - b * (jw * t).sin());
                }
                acc
            },
        )
    }

    pub fn value(&self, t: T) -> T {
        (self.value)(t)
    }

    pub fn derivative(&self, t: T) -> T {
        (self.derivative)(t)
    }
}

/// Rephases the basis, `v'_n = e^{iα_n(t)}·v_n`, transforming the closed-form
/// derivatives along with it when present.
pub fn transform_frames<T: Real>(frames: &FrameTrajectory<T>, alphas: &[PhaseFunction<T>]) -> Result<FrameTrajectory<T>> {
    let n = frames.dim();
    if alphas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: alphas.len() });
    }
    let mut vectors = Vec::with_capacity(frames.vectors.len());
    let mut derivatives = frames.derivatives.as_ref().map(|d| Vec::with_capacity(d.len()));
    for (k, v) in frames.vectors.iter().enumerate() {
        let t = frames.grid.time(k);
        let mut vt = v.clone();
        let mut dt = frames.derivatives.as_ref().map(|d| d[k].clone());
        for (level, alpha) in alphas.iter().enumerate() {
            let f = Complex::from_polar(T::one(), alpha.value(t));
            let col = v.column(level);
            vt.set_column(level, &col.iter().map(|&z| z * f).collect::<Vec<_>>());
            if let (Some(d), Some(dv)) = (dt.as_mut(), frames.derivatives.as_ref()) {
                let ia = Complex::new(T::zero(), alpha.derivative(t));
                let dcol: Vec<_> = dv[k].column(level).iter().zip(&col).map(|(&dz, &z)| (dz + ia * z) * f).collect();
                d.set_column(level, &dcol);
            }
        }
        vectors.push(vt);
        if let (Some(out), Some(d)) = (derivatives.as_mut(), dt) {
            out.push(d);
        }
    }
    Ok(FrameTrajectory { vectors, derivatives, gauge: Gauge::Transformed, ..frames.clone() })
}

/// Deviations observed under a local rephasing of the basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheckReport<T> {
    /// `max_{n,t} ‖ψ'_n(t) − e^{iα_n(0)}·ψ_n(t)‖₂`
    pub state_deviation: T,
    /// `max_n |hol'_n − hol_n|`
    pub holonomy_deviation: T,
}

/// Recomputes every level's amplitude and holonomy in the rephased basis and
/// compares with the original: amplitudes must change only by the constant
/// ray phase `e^{iα_n(0)}`, holonomies not at all.
pub fn gauge_transform_check<T: Real>(
    spec: &HamiltonianSpec<T>,
    grid: &TimeGrid<T>,
    alphas: &[PhaseFunction<T>],
) -> Result<GaugeCheckReport<T>> {
    let frames = build_frames(spec, grid)?;
    let primed = transform_frames(&frames, alphas)?;
    let conn = connection(&frames)?;
    let conn_p = connection(&primed)?;
    let eff = build_effective(&frames, &conn)?;
    let eff_p = build_effective(&primed, &conn_p)?;

    let mut state_deviation = T::zero();
    let mut holonomy_deviation = T::zero();
    for (level, alpha) in alphas.iter().enumerate() {
        let psi = reconstruct(&frames, &coefficient_propagate(&eff, level)?)?;
        let psi_p = reconstruct(&primed, &coefficient_propagate(&eff_p, level)?)?;
        let ray = Complex::from_polar(T::one(), alpha.value(grid.t_start));
        for (a, b) in psi.iter().zip(&psi_p) {
            let rotated: Vec<_> = a.iter().map(|&z| z * ray).collect();
            state_deviation = state_deviation.max(distance(b, &rotated));
        }
        let h = holonomy(&frames, &conn, level)?.value();
        let h_p = holonomy(&primed, &conn_p, level)?.value();
        holonomy_deviation = holonomy_deviation.max((h - h_p).norm());
    }
    Ok(GaugeCheckReport { state_deviation, holonomy_deviation })
}

/// Trajectories of the inconsistency argument for one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport<T> {
    pub level: usize,
    pub times: Vec<T>,
    /// `L(t) = v_n(0)†·U(t)·φ_n(t)` with `φ_n(t) = exp{+i∫₀ᵗE_n}·v_n(0)`.
    pub l_re: Vec<T>,
    pub l_im: Vec<T>,
    /// `R(t) = ‖v_n(0) − v_n(t)·exp{i∫₀ᵗ A_nn}‖₂`.
    pub residual: Vec<T>,
    pub convention: String,
}

impl<T: Real> ProbeReport<T> {
    pub fn l_value(&self, k: usize) -> Complex<T> {
        Complex::new(self.l_re[k], self.l_im[k])
    }

    pub fn last(&self) -> (Complex<T>, T) {
        let k = self.times.len() - 1;
        (self.l_value(k), self.residual[k])
    }
}

pub const PROBE_CONVENTION: &str =
    "phi_n(t) = exp(+i int_0^t E_n) v_n(0); L(t) = v_n(0)^dagger U(t) phi_n(t); \
     R(t) = |v_n(0) - v_n(t) exp(i int_0^t A_nn)|; hbar = 1";

/// Evaluates the chain `v_n(0)†v_n(0) = v_n(0)†U(t)φ_n(t)` with the exact
/// propagator, next to the residual `R(t)` whose smallness the chain
/// silently assumes. `|L − 1|` tracks `R`.
pub fn ms_inconsistency_probe<T: Real>(spec: &HamiltonianSpec<T>, grid: &TimeGrid<T>, level: usize) -> Result<ProbeReport<T>> {
    let frames = build_frames(spec, grid)?;
    check_level(&frames, level)?;
    let conn = connection(&frames)?;
    let v0 = frames.vector(0, level);
    let dt = grid.dt();
    let energy_phase = cumulative_trapezoid(&frames.level_energies(level), dt);
    let geometric_phase = cumulative_trapezoid(&conn.diagonal(level), dt);
    let run = propagate(spec, grid, std::slice::from_ref(&v0))?;

    let mut report = ProbeReport {
        level,
        times: grid.times().collect(),
        l_re: Vec::with_capacity(grid.len()),
        l_im: Vec::with_capacity(grid.len()),
        residual: Vec::with_capacity(grid.len()),
        convention: PROBE_CONVENTION.to_string(),
    };
    for k in 0..grid.len() {
        let l = inner(&v0, &run.states[0][k]) * Complex::from_polar(T::one(), energy_phase[k]);
        report.l_re.push(l.re);
        report.l_im.push(l.im);
        let f = Complex::from_polar(T::one(), geometric_phase[k]);
        let transported: Vec<_> = frames.vector(k, level).into_iter().map(|z| z * f).collect();
        report.residual.push(distance(&v0, &transported));
    }
    Ok(report)
}

/// Phase content of a propagated state over the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatePhases<T> {
    /// `arg⟨ψ(0)|ψ(T)⟩`, in `(−π, π]`.
    pub total: T,
    /// `−∫⟨ψ|H|ψ⟩dt / ⟨ψ|ψ⟩`, accumulated without wrapping.
    pub dynamical: T,
    /// `total − dynamical`, not wrapped.
    pub geometric: T,
    /// `|⟨ψ(0)|ψ(T)⟩| / ‖ψ(0)‖²`; 1 for a cyclic state.
    pub return_overlap: T,
}

/// Splits the phase a state acquires over the grid into the part generated
/// by the energy expectation and the remainder.
pub fn state_phases<T: Real>(spec: &HamiltonianSpec<T>, grid: &TimeGrid<T>, initial: &[Complex<T>]) -> Result<StatePhases<T>> {
    let n0 = norm(initial);
    let n0_sq = n0 * n0;
    let mut energies = Vec::with_capacity(grid.len());
    let final_state = evolve_state(spec, grid, initial, |_, t, psi| {
        let h = spec.evaluate(t);
        energies.push(inner(psi, &h.mul_vec(psi)).re / n0_sq);
    })?;
    let dynamical = -trapezoid_range(&energies, grid.dt());
    let ov = inner(initial, &final_state);
    let total = ov.arg();
    Ok(StatePhases { total, dynamical, geometric: total - dynamical, return_overlap: ov.norm() / n0_sq })
}

/// `x` reduced to `[0, 2π)`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let r = x % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn phase_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap_phase(a - b);
    d.min(T::TAU() - d)
}

/// Builds frames, connection and the state trajectories of `level` by the
/// first-quantized route and the coefficient route; returns
/// `max_k ‖ψ_direct(t_k) − Σ_m c_m(t_k) v_m(t_k)‖₂`.
pub fn amplitude_equality_deviation<T: Real>(spec: &HamiltonianSpec<T>, grid: &TimeGrid<T>, level: usize) -> Result<T> {
    let frames = build_frames(spec, grid)?;
    check_level(&frames, level)?;
    let eff = build_effective(&frames, &connection(&frames)?)?;
    let via_coefficients = reconstruct(&frames, &coefficient_propagate(&eff, level)?)?;
    let direct = propagate(spec, grid, &[frames.vector(0, level)])?;
    Ok(direct.states[0]
        .iter()
        .zip(&via_coefficients)
        .map(|(a, b)| distance(a, b))
        .fold(T::zero(), T::max))
}
