//! Instantaneous eigenframes along a time grid and the geometric connection
//! `A_nm(t) = ⟨v_n(t)| i∂_t v_m(t)⟩` (units with ħ = 1).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, ComplexMatrix};
use crate::scalar::Real;

/// Uniform grid `t_k = t_start + k·dt`, `k = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T> {
    pub t_start: T,
    pub t_end: T,
    pub steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_start: T, t_end: T, steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid("t_end must exceed t_start".into()));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be positive".into()));
        }
        Ok(Self { t_start, t_end, steps })
    }

    #[inline]
    pub fn dt(&self) -> T {
        (self.t_end - self.t_start) / T::from_count(self.steps)
    }

    /// Grid time `t_k`; the last point is exactly `t_end`.
    #[inline]
    pub fn time(&self, k: usize) -> T {
        if k == self.steps {
            self.t_end
        } else {
            self.t_start + T::from_count(k) * self.dt()
        }
    }

    /// `t_k + dt/2`.
    #[inline]
    pub fn midpoint(&self, k: usize) -> T {
        self.t_start + (T::from_count(k) + T::lit(0.5)) * self.dt()
    }

    /// Number of grid points, `steps + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.steps).map(move |k| self.time(k))
    }

    pub fn duration(&self) -> T {
        self.t_end - self.t_start
    }

    /// Same interval with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self { steps: self.steps * factor.max(1), ..*self }
    }

    /// Index of the grid point closest to `t`, if `t` lies on the grid within
    /// a small fraction of the spacing.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let x = (t - self.t_start) / self.dt();
        let k = x.round();
        if k < T::zero() || k > T::from_count(self.steps) {
            return None;
        }
        if (x - k).abs() <= T::lit(1e-6) {
            k.to_usize()
        } else {
            None
        }
    }
}

/// Energies, eigenvectors (as columns) and their time derivatives supplied by
/// a model in closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFrame<T> {
    pub energies: Vec<T>,
    pub vectors: ComplexMatrix<T>,
    pub derivatives: ComplexMatrix<T>,
}

pub type MatrixFn<T> = Arc<dyn Fn(T) -> ComplexMatrix<T> + Send + Sync>;
pub type FrameFn<T> = Arc<dyn Fn(T) -> AnalyticFrame<T> + Send + Sync>;

/// A time-dependent Hermitian `N×N` Hamiltonian, optionally with a model
/// supplied eigenframe.
#[derive(Clone)]
pub struct HamiltonianSpec<T> {
    dim: usize,
    evaluate: MatrixFn<T>,
    analytic_frame: Option<FrameFn<T>>,
}

impl<T> fmt::Debug for HamiltonianSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("dim", &self.dim)
            .field("analytic_frame", &self.analytic_frame.is_some())
            .finish()
    }
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(dim: usize, evaluate: impl Fn(T) -> ComplexMatrix<T> + Send + Sync + 'static) -> Self {
        Self { dim, evaluate: Arc::new(evaluate), analytic_frame: None }
    }

    /// Time-independent Hamiltonian.
    pub fn constant(h: ComplexMatrix<T>) -> Self {
        let dim = h.dim();
        Self::new(dim, move |_| h.clone())
    }

    pub fn with_analytic_frame(
        mut self,
        frame: impl Fn(T) -> AnalyticFrame<T> + Send + Sync + 'static,
    ) -> Self {
        self.analytic_frame = Some(Arc::new(frame));
        self
    }

    /// Same Hamiltonian, frames left to the numerical eigensolver.
    pub fn without_analytic_frame(&self) -> Self {
        Self { dim: self.dim, evaluate: self.evaluate.clone(), analytic_frame: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, t: T) -> ComplexMatrix<T> {
        (self.evaluate)(t)
    }

    pub fn analytic_frame(&self, t: T) -> Option<AnalyticFrame<T>> {
        self.analytic_frame.as_ref().map(|f| f(t))
    }

    pub fn has_analytic_frame(&self) -> bool {
        self.analytic_frame.is_some()
    }

    /// `H_rev(s) = −H(t_start + t_end − s)`: stepping it over the same grid
    /// undoes a forward propagation.
    pub fn time_reversed(&self, grid: &TimeGrid<T>) -> Self {
        let f = self.evaluate.clone();
        let pivot = grid.t_start + grid.t_end;
        Self::new(self.dim, move |s| -f(pivot - s))
    }
}

/// Gauge convention of a frame trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Numerical eigenvectors with `⟨v_n(t_k)|v_n(t_{k+1})⟩` rotated real positive.
    Continuity,
    /// Frames taken verbatim from the model.
    ModelAnalytic,
    /// Any of the above multiplied by user phases `e^{iα_n(t)}`.
    Transformed,
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::Continuity => "continuity",
            Gauge::ModelAnalytic => "model_analytic",
            Gauge::Transformed => "transformed",
        })
    }
}

/// Instantaneous energies and orthonormal eigenvectors on every grid point.
#[derive(Clone, Debug)]
pub struct FrameTrajectory<T> {
    pub grid: TimeGrid<T>,
    /// `energies[k][n] = E_n(t_k)`.
    pub energies: Vec<Vec<T>>,
    /// `vectors[k]` holds `v_n(t_k)` as column `n`.
    pub vectors: Vec<ComplexMatrix<T>>,
    /// `∂_t v_n(t_k)` as columns, when known in closed form.
    pub derivatives: Option<Vec<ComplexMatrix<T>>>,
    pub gauge: Gauge,
    /// `max_t ‖H(t)‖_max` over the grid.
    pub h_scale: T,
    /// `‖H(t_end) − H(t_start)‖_max / h_scale`.
    pub endpoint_mismatch: T,
}

impl<T: Real> FrameTrajectory<T> {
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.dim())
    }

    pub fn vector(&self, k: usize, n: usize) -> Vec<Complex<T>> {
        self.vectors[k].column(n)
    }

    /// `max_k ‖V_k†V_k − I‖_max`.
    pub fn orthonormality_defect(&self) -> T {
        self.vectors.iter().fold(T::zero(), |acc, v| acc.max(v.unitarity_defect()))
    }

    /// Whether the Hamiltonian returns to itself at the end of the grid.
    pub fn is_cyclic(&self) -> bool {
        self.endpoint_mismatch <= T::lit(1e-10)
    }

    pub fn level_energies(&self, n: usize) -> Vec<T> {
        self.energies.iter().map(|e| e[n]).collect()
    }
}

fn gap_floor<T: Real>(h_max: T) -> T {
    T::lit(T::GAP_FLOOR) * h_max
}

fn check_gap<T: Real>(energies: &[T], h_max: T, t: T) -> Result<()> {
    let mut sorted = energies.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let floor = gap_floor(h_max);
    for w in sorted.windows(2) {
        let gap = w[1] - w[0];
        if gap <= floor {
            return Err(Error::EigenGapTooSmall { time: t.as_f64(), gap: gap.as_f64(), floor: floor.as_f64() });
        }
    }
    Ok(())
}

/// Multiplies each column so that its largest-modulus entry is real positive.
fn normalize_phases<T: Real>(v: &mut ComplexMatrix<T>) {
    let n = v.dim();
    for j in 0..n {
        let col = v.column(j);
        let max = col.iter().fold(T::zero(), |a, z| a.max(z.norm()));
        let Some(pivot) = col.iter().find(|z| z.norm() >= max * T::lit(1.0 - 1e-9)) else { continue };
        if pivot.norm().is_zero() {
            continue;
        }
        let phase = pivot.conj() / pivot.norm();
        let rotated: Vec<_> = col.iter().map(|&z| z * phase).collect();
        v.set_column(j, &rotated);
    }
}

/// Greedy maximal-overlap assignment: returns `perm` with new column
/// `perm[i]` continuing previous column `i`.
fn match_columns<T: Real>(prev: &ComplexMatrix<T>, next: &ComplexMatrix<T>) -> (Vec<usize>, ComplexMatrix<T>) {
    let overlaps = &prev.adjoint() * next;
    let n = prev.dim();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(i1, j1), &(i2, j2)| {
        overlaps[(i2, j2)]
            .norm()
            .partial_cmp(&overlaps[(i1, j1)].norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((i1, j1).cmp(&(i2, j2)))
    });
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (i, j) in pairs {
        if perm[i] == usize::MAX && !taken[j] {
            perm[i] = j;
            taken[j] = true;
        }
    }
    (perm, overlaps)
}

/// Builds the frame trajectory of `spec` on `grid`.
///
/// Uses the model frames when the spec supplies them; otherwise diagonalizes
/// at every grid point, continues each level by maximal overlap with the
/// previous point and fixes phases so consecutive overlaps are real positive.
pub fn build_frames<T: Real>(spec: &HamiltonianSpec<T>, grid: &TimeGrid<T>) -> Result<FrameTrajectory<T>> {
    let n = spec.dim();
    let mut energies = Vec::with_capacity(grid.len());
    let mut vectors: Vec<ComplexMatrix<T>> = Vec::with_capacity(grid.len());
    let mut derivatives = spec.has_analytic_frame().then(|| Vec::with_capacity(grid.len()));
    let mut h_scale = T::zero();

    for k in 0..grid.len() {
        let t = grid.time(k);
        let h = spec.evaluate(t);
        if h.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h.dim() });
        }
        h.ensure_hermitian()?;
        let h_max = h.max_abs();
        h_scale = h_scale.max(h_max);

        if let Some(frame) = spec.analytic_frame(t) {
            if frame.vectors.dim() != n || frame.energies.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: frame.vectors.dim() });
            }
            check_gap(&frame.energies, h_max, t)?;
            energies.push(frame.energies);
            vectors.push(frame.vectors);
            if let Some(d) = derivatives.as_mut() {
                d.push(frame.derivatives);
            }
            continue;
        }

        let eig = eig_hermitian(&h)?;
        check_gap(&eig.eigenvalues, h_max, t)?;
        let Some(prev) = vectors.last() else {
            let mut v = eig.eigenvectors;
            normalize_phases(&mut v);
            energies.push(eig.eigenvalues);
            vectors.push(v);
            continue;
        };
        let (perm, overlaps) = match_columns(prev, &eig.eigenvectors);
        let mut v = ComplexMatrix::zeros(n);
        let mut e = Vec::with_capacity(n);
        for (i, &j) in perm.iter().enumerate() {
            let o = overlaps[(i, j)];
            let phase = if o.norm().is_zero() { Complex::new(T::one(), T::zero()) } else { o.conj() / o.norm() };
            let col: Vec<_> = eig.eigenvectors.column(j).iter().map(|&z| z * phase).collect();
            v.set_column(i, &col);
            e.push(eig.eigenvalues[j]);
        }
        energies.push(e);
        vectors.push(v);
    }

    let h0 = spec.evaluate(grid.t_start);
    let h1 = spec.evaluate(grid.t_end);
    let endpoint_mismatch = if h_scale.is_zero() { T::zero() } else { h1.max_distance(&h0) / h_scale };

    Ok(FrameTrajectory {
        grid: *grid,
        energies,
        vectors,
        derivatives,
        gauge: if spec.has_analytic_frame() { Gauge::ModelAnalytic } else { Gauge::Continuity },
        h_scale,
        endpoint_mismatch,
    })
}

/// `A(t_k)` on every grid point.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix<T> {
    pub grid: TimeGrid<T>,
    pub matrices: Vec<ComplexMatrix<T>>,
}

impl<T: Real> ConnectionMatrix<T> {
    pub fn at(&self, k: usize) -> &ComplexMatrix<T> {
        &self.matrices[k]
    }

    /// `Re A_nn(t_k)` for all `k`.
    pub fn diagonal(&self, n: usize) -> Vec<T> {
        self.matrices.iter().map(|a| a[(n, n)].re).collect()
    }

    /// `max_k ‖A(t_k) − A(t_k)†‖_max`.
    pub fn hermiticity_defect(&self) -> T {
        self.matrices.iter().fold(T::zero(), |acc, a| acc.max(a.hermiticity_defect()))
    }

    /// Entrywise scaling, used to probe the criteria.
    pub fn scaled(&self, s: T) -> Self {
        Self { grid: self.grid, matrices: self.matrices.iter().map(|a| a.scale(s)).collect() }
    }
}

/// Connection from the closed-form derivatives when present, otherwise from
/// finite differences of the frames.
pub fn connection<T: Real>(frames: &FrameTrajectory<T>) -> Result<ConnectionMatrix<T>> {
    match &frames.derivatives {
        Some(d) => Ok(ConnectionMatrix {
            grid: frames.grid,
            matrices: frames
                .vectors
                .iter()
                .zip(d)
                .map(|(v, dv)| (&v.adjoint() * dv).scale_complex(Complex::i()))
                .collect(),
        }),
        None => finite_difference_connection(frames),
    }
}

/// Second-order finite-difference connection: central stencils inside,
/// one-sided three-point stencils at the endpoints.
pub fn finite_difference_connection<T: Real>(frames: &FrameTrajectory<T>) -> Result<ConnectionMatrix<T>> {
    let k_max = frames.grid.steps;
    if k_max < 2 {
        return Err(Error::InvalidGrid("finite differences need at least 2 steps".into()));
    }
    let v = &frames.vectors;
    let inv = T::one() / (frames.grid.dt() + frames.grid.dt());
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let matrices = (0..=k_max)
        .map(|k| {
            let d = if k == 0 {
                &(&v[1].scale(four) - &v[0].scale(three)) - &v[2]
            } else if k == k_max {
                &(&v[k].scale(three) - &v[k - 1].scale(four)) + &v[k - 2]
            } else {
                &v[k + 1] - &v[k - 1]
            };
            (&v[k].adjoint() * &d).scale_complex(Complex::new(T::zero(), inv))
        })
        .collect();
    Ok(ConnectionMatrix { grid: frames.grid, matrices })
}

/// Trapezoidal running integral of samples on a uniform grid.
pub fn cumulative_trapezoid<T: Real>(values: &[T], dt: T) -> Vec<T> {
    let half = T::lit(0.5) * dt;
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in values.windows(2) {
        acc += half * (w[0] + w[1]);
        out.push(acc);
    }
    out
}
