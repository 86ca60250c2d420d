//! Built-in Hamiltonians with closed-form frames.

mod marzlin_sanders;
mod rotating;

pub use marzlin_sanders::{
    barred_model, ms_candidate_evolution, ms_second_model, reversed_sign_cycle_state, Angles, BarredModel,
    CandidateDirection, MsSecondModelParams,
};
pub use rotating::{
    exact_cycle_phases, geometric_phase_point, geometric_phase_sweep, log_spaced, rotating_exact_derivative,
    rotating_exact_solution, rotating_model, CyclePhases, RotatingModelParams, Spin, SweepPoint,
};
