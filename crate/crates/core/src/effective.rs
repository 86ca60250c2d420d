//! The effective Hamiltonian `M_nm(t) = E_n(t)·δ_nm − A_nm(t)` governing the
//! instantaneous-basis coefficients, and the adiabaticity criteria built
//! from its diagonal dominance.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::propagate::State;
use crate::scalar::Real;
use crate::spectral::{cumulative_trapezoid, ConnectionMatrix, FrameTrajectory, Gauge, TimeGrid};

#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian<T> {
    pub grid: TimeGrid<T>,
    pub matrices: Vec<ComplexMatrix<T>>,
    /// Energies the matrices were built from, `[k][n]`.
    pub energies: Vec<Vec<T>>,
    pub connection: ConnectionMatrix<T>,
    pub gauge: Gauge,
}

impl<T: Real> EffectiveHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.dim())
    }

    pub fn hermiticity_defect(&self) -> T {
        self.matrices.iter().fold(T::zero(), |acc, m| acc.max(m.hermiticity_defect()))
    }
}

pub fn build_effective<T: Real>(
    frames: &FrameTrajectory<T>,
    conn: &ConnectionMatrix<T>,
) -> Result<EffectiveHamiltonian<T>> {
    if frames.grid != conn.grid || frames.energies.len() != conn.matrices.len() {
        return Err(Error::GridMismatch);
    }
    let matrices = frames
        .energies
        .iter()
        .zip(&conn.matrices)
        .map(|(e, a)| &ComplexMatrix::from_real_diagonal(e) - a)
        .collect();
    Ok(EffectiveHamiltonian {
        grid: frames.grid,
        matrices,
        energies: frames.energies.clone(),
        connection: conn.clone(),
        gauge: frames.gauge,
    })
}

/// Where a ratio's numerator peaked and its denominator bottomed out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioWitness<T> {
    pub numerator: T,
    pub numerator_time: T,
    pub numerator_pair: (usize, usize),
    pub denominator: T,
    pub denominator_time: T,
    pub denominator_pair: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub naive: bool,
    pub gap: bool,
    pub level: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witnesses<T> {
    pub naive: RatioWitness<T>,
    pub gap: RatioWitness<T>,
    pub level: RatioWitness<T>,
}

/// The three worst-case-over-time diagonal-dominance ratios.
///
/// * `r_naive`: off-diagonal connection vs. bare level spacing.
/// * `r_gap`: off-diagonal connection vs. spacing of the effective diagonal.
/// * `r_level`: off-diagonal connection vs. magnitude of the effective
///   diagonal after shifting energies by `energy_offset`.
///
/// A ratio whose denominator degenerates is reported as `+∞` (serialized as
/// the string `"inf"`) with a false verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CriteriaReport<T> {
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub r_naive: T,
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub r_gap: T,
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub r_level: T,
    pub epsilon: T,
    pub verdicts: Verdicts,
    pub witnesses: Witnesses<T>,
    pub energy_offset: T,
    /// Names of ratios whose denominator fell below the degeneracy floor.
    #[serde(default)]
    pub degenerate: Vec<String>,
}

fn ser_ratio<T: Real, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        v.serialize(s)
    } else {
        s.serialize_str("inf")
    }
}

fn de_ratio<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<T> {
        Num(T),
        Text(String),
    }
    match Repr::<T>::deserialize(d)? {
        Repr::Num(x) => Ok(x),
        Repr::Text(s) if s == "inf" => Ok(T::infinity()),
        Repr::Text(s) => Err(serde::de::Error::custom(format!("invalid ratio {s:?}"))),
    }
}

struct Extremum<T> {
    value: T,
    time: T,
    pair: (usize, usize),
}

impl<T: Real> Extremum<T> {
    fn max_by(&mut self, value: T, time: T, pair: (usize, usize)) {
        if value > self.value {
            *self = Self { value, time, pair };
        }
    }
    fn min_by(&mut self, value: T, time: T, pair: (usize, usize)) {
        if value < self.value {
            *self = Self { value, time, pair };
        }
    }
}

/// Evaluates the diagonal-dominance criteria of `eff` at threshold `epsilon`.
pub fn criteria<T: Real>(eff: &EffectiveHamiltonian<T>, epsilon: T, energy_offset: T) -> Result<CriteriaReport<T>> {
    let n = eff.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("criteria need at least two levels".into()));
    }
    if epsilon.is_nan() || epsilon <= T::zero() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let t0 = eff.grid.t_start;
    let mut num = Extremum { value: T::zero(), time: t0, pair: (0, 1) };
    let mut den_naive = Extremum { value: T::infinity(), time: t0, pair: (0, 1) };
    let mut den_gap = Extremum { value: T::infinity(), time: t0, pair: (0, 1) };
    let mut den_level = Extremum { value: T::infinity(), time: t0, pair: (0, 0) };

    for (k, (a, e)) in eff.connection.matrices.iter().zip(&eff.energies).enumerate() {
        let t = eff.grid.time(k);
        let eff_diag: Vec<T> = (0..n).map(|i| e[i] - a[(i, i)].re).collect();
        for i in 0..n {
            den_level.min_by((eff_diag[i] + energy_offset).abs(), t, (i, i));
            for j in 0..n {
                if i == j {
                    continue;
                }
                num.max_by(a[(i, j)].norm(), t, (i, j));
                if i < j {
                    den_naive.min_by((e[i] - e[j]).abs(), t, (i, j));
                    den_gap.min_by((eff_diag[i] - eff_diag[j]).abs(), t, (i, j));
                }
            }
        }
    }

    let floor = T::lit(T::DEGENERATE_DENOMINATOR);
    let mut degenerate = Vec::new();
    let mut ratio = |name: &str, den: &Extremum<T>| {
        if den.value < floor {
            degenerate.push(name.to_string());
            T::infinity()
        } else {
            num.value / den.value
        }
    };
    let r_naive = ratio("r_naive", &den_naive);
    let r_gap = ratio("r_gap", &den_gap);
    let r_level = ratio("r_level", &den_level);

    let witness = |den: &Extremum<T>| RatioWitness {
        numerator: num.value,
        numerator_time: num.time,
        numerator_pair: num.pair,
        denominator: den.value,
        denominator_time: den.time,
        denominator_pair: den.pair,
    };
    Ok(CriteriaReport {
        r_naive,
        r_gap,
        r_level,
        epsilon,
        verdicts: Verdicts { naive: r_naive < epsilon, gap: r_gap < epsilon, level: r_level < epsilon },
        witnesses: Witnesses { naive: witness(&den_naive), gap: witness(&den_gap), level: witness(&den_level) },
        energy_offset,
        degenerate,
    })
}

/// Adiabatic amplitude `ψ_n(t) ≈ v_n(t)·exp{−i∫₀ᵗ [E_n − A_nn] dt'}` with a
/// trapezoidal phase integral.
pub fn adiabatic_amplitude<T: Real>(
    frames: &FrameTrajectory<T>,
    conn: &ConnectionMatrix<T>,
    level: usize,
) -> Result<Vec<State<T>>> {
    if frames.grid != conn.grid {
        return Err(Error::GridMismatch);
    }
    if level >= frames.dim() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    let integrand: Vec<T> = frames
        .energies
        .iter()
        .zip(&conn.matrices)
        .map(|(e, a)| e[level] - a[(level, level)].re)
        .collect();
    let phase = cumulative_trapezoid(&integrand, frames.grid.dt());
    Ok(phase
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let f = Complex::from_polar(T::one(), -p);
            frames.vector(k, level).into_iter().map(|z| z * f).collect()
        })
        .collect())
}
