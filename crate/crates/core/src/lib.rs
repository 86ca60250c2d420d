//! Second-quantized treatment of the adiabatic approximation.
//!
//! A Hamiltonian `H(t)` is expanded in its instantaneous eigenframes `v_n(t)`;
//! the evolution of the expansion coefficients is generated by the effective
//! matrix `M = diag(E) − A` with connection `A_nm = ⟨v_n|i∂_t v_m⟩`. The crate
//! builds frames and connections, evaluates adiabaticity criteria on `M`,
//! propagates exactly, and extracts dynamical/geometric phases and holonomies.
//! Units: `ħ = 1`, energies in angular frequency.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`.

pub mod effective;
pub mod error;
pub mod models;
pub mod numerics;
pub mod phases;
pub mod propagate;
pub mod scalar;
pub mod spectral;

pub use effective::{
    adiabatic_amplitude, build_effective, criteria, CriteriaReport, EffectiveHamiltonian, RatioWitness, Verdicts,
    Witnesses,
};
pub use error::{Error, Result};
pub use numerics::{eig_hermitian, exp_antihermitian, pauli, ComplexMatrix, HermitianEigen};
pub use phases::{
    amplitude_equality_deviation, gauge_transform_check, holonomy, ms_inconsistency_probe, parallel_transport,
    phase_distance, phase_split, phase_split_range, state_phases, transform_frames, wrap_phase, GaugeCheckReport,
    Holonomy, ParallelTransport, PhaseFunction, PhaseSplit, ProbeReport, StatePhases,
};
pub use propagate::{
    coefficient_evolution, coefficient_propagate, composition_check, evolve_state, frame_matrix_elements,
    grid_triples, propagate, reconstruct, EvolutionTable, PropagationResult, State,
};
pub use scalar::Real;
pub use spectral::{
    build_frames, connection, finite_difference_connection, AnalyticFrame, ConnectionMatrix, FrameTrajectory, Gauge,
    HamiltonianSpec, TimeGrid,
};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type Spec = HamiltonianSpec<f64>;
pub type Grid = TimeGrid<f64>;
pub type Frames = FrameTrajectory<f64>;
pub type Connection = ConnectionMatrix<f64>;
pub type Effective = EffectiveHamiltonian<f64>;
pub type Criteria = CriteriaReport<f64>;
