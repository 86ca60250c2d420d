//! Time-ordered exponential stepping, projections onto instantaneous frames
//! and the composition-law check.

use num_complex::Complex;

use crate::effective::EffectiveHamiltonian;
use crate::error::{Error, Result};
use crate::numerics::{exp_antihermitian, inner, norm, ComplexMatrix};
use crate::scalar::Real;
use crate::spectral::{FrameTrajectory, HamiltonianSpec, TimeGrid};

pub type State<T> = Vec<Complex<T>>;

/// `exp(−i·H(t_k + dt/2)·dt)`.
pub fn midpoint_step<T: Real>(spec: &HamiltonianSpec<T>, grid: &TimeGrid<T>, k: usize) -> Result<ComplexMatrix<T>> {
    let h = spec.evaluate(grid.midpoint(k));
    if h.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: h.dim() });
    }
    exp_antihermitian(&h, grid.dt())?.check_finite("midpoint_step")
}

/// Cumulative propagators `U(t_k, t_start)` together with the individual step
/// factors they were built from.
#[derive(Clone, Debug)]
pub struct EvolutionTable<T> {
    pub grid: TimeGrid<T>,
    pub propagators: Vec<ComplexMatrix<T>>,
    pub steps: Vec<ComplexMatrix<T>>,
}

impl<T: Real> EvolutionTable<T> {
    fn from_steps(grid: TimeGrid<T>, dim: usize, steps: Vec<ComplexMatrix<T>>) -> Self {
        let mut propagators = Vec::with_capacity(steps.len() + 1);
        propagators.push(ComplexMatrix::identity(dim));
        for s in &steps {
            let next = s * propagators.last().expect("non-empty");
            propagators.push(next);
        }
        Self { grid, propagators, steps }
    }

    pub fn dim(&self) -> usize {
        self.propagators[0].dim()
    }

    /// `U(t_j, t_i)` as the ordered product of the step factors in between;
    /// for `j < i` the adjoint of `U(t_i, t_j)`.
    pub fn between(&self, j: usize, i: usize) -> ComplexMatrix<T> {
        if j < i {
            return self.between(i, j).adjoint();
        }
        let mut u = ComplexMatrix::identity(self.dim());
        for s in &self.steps[i..j] {
            u = s * &u;
        }
        u
    }

    /// `U(t2, t1)` for grid-aligned times.
    pub fn between_times(&self, t2: T, t1: T) -> Option<ComplexMatrix<T>> {
        Some(self.between(self.grid.index_of(t2)?, self.grid.index_of(t1)?))
    }

    pub fn max_unitarity_defect(&self) -> T {
        self.propagators.iter().fold(T::zero(), |acc, u| acc.max(u.unitarity_defect()))
    }
}

/// Propagators and state trajectories of one stepping run.
#[derive(Clone, Debug)]
pub struct PropagationResult<T> {
    pub evolution: EvolutionTable<T>,
    /// `states[i][k] = ψ_i(t_k)` for the `i`-th initial state.
    pub states: Vec<Vec<State<T>>>,
}

impl<T: Real> PropagationResult<T> {
    pub fn grid(&self) -> &TimeGrid<T> {
        &self.evolution.grid
    }

    pub fn propagator(&self, k: usize) -> &ComplexMatrix<T> {
        &self.evolution.propagators[k]
    }

    pub fn final_state(&self, i: usize) -> &State<T> {
        self.states[i].last().expect("non-empty trajectory")
    }

    /// `c_m(t_k) = ⟨v_m(t_k)|ψ_i(t_k)⟩`, indexed `[i][k][m]`.
    pub fn coefficients(&self, frames: &FrameTrajectory<T>) -> Result<Vec<Vec<State<T>>>> {
        if frames.grid != *self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .states
            .iter()
            .map(|traj| traj.iter().zip(&frames.vectors).map(|(psi, v)| v.adjoint().mul_vec(psi)).collect())
            .collect())
    }

    /// `max_{i,k} |‖ψ_i(t_k)‖ − 1|` relative to the initial norm.
    pub fn max_norm_defect(&self) -> T {
        self.states
            .iter()
            .flat_map(|traj| {
                let n0 = norm(&traj[0]);
                traj.iter().map(move |psi| (norm(psi) - n0).abs())
            })
            .fold(T::zero(), T::max)
    }
}

/// Midpoint-exponential propagation of `spec` over `grid`.
///
/// `U(t_{k+1}, t_start) = exp(−i·H(t_k + dt/2)·dt)·U(t_k, t_start)`; global
/// error is `O(dt²)`.
pub fn propagate<T: Real>(
    spec: &HamiltonianSpec<T>,
    grid: &TimeGrid<T>,
    initial: &[State<T>],
) -> Result<PropagationResult<T>> {
    let n = spec.dim();
    for psi in initial {
        if psi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: psi.len() });
        }
    }
    let steps = (0..grid.steps).map(|k| midpoint_step(spec, grid, k)).collect::<Result<Vec<_>>>()?;
    let evolution = EvolutionTable::from_steps(*grid, n, steps);
    let states = initial
        .iter()
        .map(|psi| evolution.propagators.iter().map(|u| u.mul_vec(psi)).collect())
        .collect();
    Ok(PropagationResult { evolution, states })
}

/// State-only propagation without storing propagators. `observe` is called
/// at every grid point with `(k, t_k, ψ(t_k))`; returns `ψ(t_end)`.
pub fn evolve_state<T: Real>(
    spec: &HamiltonianSpec<T>,
    grid: &TimeGrid<T>,
    initial: &[Complex<T>],
    mut observe: impl FnMut(usize, T, &[Complex<T>]),
) -> Result<State<T>> {
    if initial.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: initial.len() });
    }
    let mut psi = initial.to_vec();
    observe(0, grid.t_start, &psi);
    for k in 0..grid.steps {
        psi = midpoint_step(spec, grid, k)?.mul_vec(&psi);
        observe(k + 1, grid.time(k + 1), &psi);
    }
    Ok(psi)
}

/// Stepping table of the coefficient vector under `M(t)`.
///
/// `M` is only known on grid points, so each step exponentiates the
/// Hermitian part of `(M(t_k) + M(t_{k+1}))/2`, which keeps the scheme
/// second order and exactly unitary.
pub fn coefficient_evolution<T: Real>(eff: &EffectiveHamiltonian<T>) -> Result<EvolutionTable<T>> {
    let grid = eff.grid;
    let dt = grid.dt();
    let half = T::lit(0.5);
    let steps = eff
        .matrices
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]).scale(half).hermitian_part();
            exp_antihermitian(&mid, dt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionTable::from_steps(grid, eff.dim(), steps))
}

/// `c(t_k)` with `c(t_start) = e_level`.
pub fn coefficient_propagate<T: Real>(eff: &EffectiveHamiltonian<T>, level: usize) -> Result<Vec<State<T>>> {
    if level >= eff.dim() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    let table = coefficient_evolution(eff)?;
    Ok(table.propagators.iter().map(|w| w.column(level)).collect())
}

/// `ψ(t_k) = Σ_m c_m(t_k)·v_m(t_k)`.
pub fn reconstruct<T: Real>(frames: &FrameTrajectory<T>, coefficients: &[State<T>]) -> Result<Vec<State<T>>> {
    if coefficients.len() != frames.vectors.len() {
        return Err(Error::GridMismatch);
    }
    Ok(frames.vectors.iter().zip(coefficients).map(|(v, c)| v.mul_vec(c)).collect())
}

/// `⟨v_m(t_k)|U(t_k)|v_n(t_start)⟩` for every grid point: the right-hand side
/// of the first/second-quantized amplitude equality.
pub fn frame_matrix_elements<T: Real>(
    frames: &FrameTrajectory<T>,
    evolution: &EvolutionTable<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    if frames.grid != evolution.grid {
        return Err(Error::GridMismatch);
    }
    let v0 = &frames.vectors[0];
    Ok(frames
        .vectors
        .iter()
        .zip(&evolution.propagators)
        .map(|(v, u)| &(&v.adjoint() * u) * v0)
        .collect())
}

/// `max ‖U(t3,t1) − U(t3,t2)·U(t2,t1)‖_max` over the supplied `(t1, t2, t3)`.
pub fn composition_check<T: Real, F>(evolution: F, triples: &[(T, T, T)]) -> T
where
    F: Fn(T, T) -> ComplexMatrix<T>,
{
    triples
        .iter()
        .map(|&(t1, t2, t3)| {
            let direct = evolution(t3, t1);
            let composed = &evolution(t3, t2) * &evolution(t2, t1);
            direct.max_distance(&composed)
        })
        .fold(T::zero(), T::max)
}

/// Grid-aligned triples `(t_i, t_j, t_l)` with `i ≤ j ≤ l` on a lattice of
/// `points` evenly spaced indices, plus the doubling triples `(t_0, t_k, t_2k)`.
pub fn grid_triples<T: Real>(grid: &TimeGrid<T>, points: usize) -> Vec<(T, T, T)> {
    let points = points.clamp(2, grid.len());
    let idx: Vec<usize> = (0..points).map(|p| p * grid.steps / (points - 1)).collect();
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate().skip(a) {
            for &l in &idx[b..] {
                out.push((grid.time(i), grid.time(j), grid.time(l)));
            }
        }
    }
    let stride = (grid.steps / 16).max(1);
    let mut k = stride;
    while 2 * k <= grid.steps {
        out.push((grid.time(0), grid.time(k), grid.time(2 * k)));
        k += stride;
    }
    out
}

/// `|⟨a|b⟩|`.
pub fn overlap<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    inner(a, b).norm()
}
