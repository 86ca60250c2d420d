//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p adiabatica-core --test acceptance`.

mod common;

use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use adiabatica_core::models::{
    barred_model, exact_cycle_phases, geometric_phase_sweep, ms_candidate_evolution, ms_second_model,
    reversed_sign_cycle_state, rotating_exact_solution, rotating_model, CandidateDirection, MsSecondModelParams,
    RotatingModelParams, Spin,
};
use adiabatica_core::numerics::distance;
use adiabatica_core::propagate::overlap;
use adiabatica_core::{
    amplitude_equality_deviation, build_effective, build_frames, coefficient_evolution, coefficient_propagate,
    composition_check, connection, criteria, finite_difference_connection, gauge_transform_check, grid_triples,
    holonomy, parallel_transport, phase_distance, propagate, reconstruct, state_phases, PhaseFunction, Spec,
    TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = adiabatica_core::Result<(bool, String)>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

const SEED: u64 = 0x5eed_2007;

fn rotating(mu_b: f64, theta: f64, omega: f64) -> (RotatingModelParams<f64>, Spec) {
    let p = RotatingModelParams::new(mu_b, theta, omega).expect("valid parameters");
    (p, rotating_model(&p))
}

/// `max_± ‖ψ_numeric(T) − ψ_exact(T)‖₂` for the exact cyclic solutions.
fn exact_solution_error(p: &RotatingModelParams<f64>, spec: &Spec, steps: usize) -> adiabatica_core::Result<f64> {
    let grid = TimeGrid::new(0.0, p.period(), steps)?;
    let levels = [Spin::Plus, Spin::Minus];
    let initial: Vec<_> = levels.iter().map(|&l| rotating_exact_solution(p, l, 0.0)).collect();
    let run = propagate(spec, &grid, &initial)?;
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, &l)| distance(run.final_state(i), &rotating_exact_solution(p, l, p.period())))
        .fold(0.0, f64::max))
}

fn exact_solution_oracle() -> Outcome {
    let (p, spec) = rotating(1.0, FRAC_PI_3, 0.5);
    let start = Instant::now();
    let coarse = exact_solution_error(&p, &spec, 4096)?;
    let elapsed = start.elapsed().as_secs_f64();
    let fine = exact_solution_error(&p, &spec, 8192)?;
    let ratio = coarse / fine;
    let pass = coarse <= 1e-5 && (3.2..=4.8).contains(&ratio) && elapsed < 5.0;
    Ok((pass, format!("error {coarse:.3e} (≤ 1e-5), halving ratio {ratio:.3} (4 ± 0.8), {elapsed:.2} s (< 5 s)")))
}

fn berry_phase_limit() -> Outcome {
    let (p, spec) = rotating(1.0, FRAC_PI_3, 1e-3);
    let berry = PI * (1.0 + FRAC_PI_3.cos());
    let exact = exact_cycle_phases(&p, Spin::Plus).geometric;
    let grid = TimeGrid::new(0.0, p.period(), 1 << 18)?;
    let numeric = state_phases(&spec, &grid, &rotating_exact_solution(&p, Spin::Plus, 0.0))?;
    let frames = build_frames(&spec, &grid)?;
    let hol = holonomy(&frames, &connection(&frames)?, Spin::Plus.index())?;
    let (d_exact, d_numeric) = (phase_distance(exact, berry), phase_distance(numeric.geometric, berry));
    let d_hol = phase_distance(hol.phase(), berry);
    let pass = d_exact <= 5e-3 && d_numeric <= 5e-3 && d_hol <= 5e-3;
    Ok((
        pass,
        format!(
            "|Δ| from 3π/2: exact {d_exact:.3e}, propagated {d_numeric:.3e}, frame holonomy {d_hol:.3e} (≤ 5e-3)"
        ),
    ))
}

fn non_adiabatic_limit() -> Outcome {
    let (p, spec) = rotating(1e-3, FRAC_PI_3, 1.0);
    let exact = exact_cycle_phases(&p, Spin::Plus).geometric;
    let grid = TimeGrid::new(0.0, p.period(), 4096)?;
    let numeric = state_phases(&spec, &grid, &rotating_exact_solution(&p, Spin::Plus, 0.0))?;
    let (d_exact, d_numeric) = (phase_distance(exact, 0.0), phase_distance(numeric.geometric, 0.0));
    let sweep = geometric_phase_sweep(FRAC_PI_3, 1e-3, 1e3, 61)?;
    let max_jump = sweep.windows(2).map(|w| (w[1].geometric - w[0].geometric).abs()).fold(0.0, f64::max);
    let ends = sweep[0].from_adiabatic <= 5e-3 && sweep[60].from_trivial <= 5e-3;
    let pass = d_exact <= 5e-3 && d_numeric <= 5e-3 && max_jump < 0.2 && ends;
    Ok((
        pass,
        format!(
            "|Δ| from 0 mod 2π: exact {d_exact:.3e}, propagated {d_numeric:.3e} (≤ 5e-3); sweep max jump {max_jump:.3} rad (< 0.2)"
        ),
    ))
}

struct BarredSetup {
    base: Spec,
    grid: TimeGrid<f64>,
    barred: adiabatica_core::models::BarredModel<f64>,
}

fn barred_setup() -> adiabatica_core::Result<BarredSetup> {
    let (p, base) = rotating(1.0, FRAC_PI_3, 1e-3);
    let grid = TimeGrid::new(0.0, p.period(), 4096)?;
    let barred = barred_model(&base, &grid, 16)?;
    Ok(BarredSetup { base, grid, barred })
}

fn effective_collapse(setup: &BarredSetup) -> Outcome {
    let frames = build_frames(setup.barred.spec(), &setup.grid)?;
    let eff = build_effective(&frames, &connection(&frames)?)?;
    let base_conn = connection(&build_frames(&setup.base, &setup.grid)?)?;
    let collapse = (0..setup.grid.len())
        .map(|k| (&eff.matrices[k] + base_conn.at(k)).max_abs())
        .fold(0.0, f64::max);
    let report = criteria(&eff, 0.1, 0.0)?;
    let pass = collapse <= 1e-6 && report.verdicts.naive && !report.verdicts.gap;
    Ok((
        pass,
        format!(
            "max ‖M̄ + A‖ {collapse:.3e} (≤ 1e-6); r_naive {:.3e} → {}, r_gap {:.3} → {} (want true/false)",
            report.r_naive, report.verdicts.naive, report.r_gap, report.verdicts.gap
        ),
    ))
}

fn exact_identity(setup: &BarredSetup) -> Outcome {
    let frames = build_frames(setup.barred.spec(), &setup.grid)?;
    let eff = build_effective(&frames, &connection(&frames)?)?;
    let base_frames = build_frames(&setup.base, &setup.grid)?;
    let base_conn = connection(&base_frames)?;
    let (mut identity, mut cycle) = (0.0f64, 0.0f64);
    for level in 0..2 {
        let second_quantized = reconstruct(&frames, &coefficient_propagate(&eff, level)?)?;
        let exact = setup.barred.exact_states(&base_frames.vector(0, level))?;
        for (a, b) in second_quantized.iter().zip(&exact) {
            identity = identity.max(distance(a, b));
        }
        let predicted = reversed_sign_cycle_state(&base_frames, &base_conn, level)?;
        cycle = cycle.max(1.0 - overlap(exact.last().expect("grid"), &predicted));
    }
    let pass = identity <= 1e-5 && cycle <= 1e-3;
    Ok((
        pass,
        format!("max ‖ψ̄ − U†v(0)‖ {identity:.3e} (≤ 1e-5); one-cycle 1 − |overlap| {cycle:.3e} (≤ 1e-3)"),
    ))
}

fn composition_law() -> Outcome {
    let p = MsSecondModelParams::new(4.0 * PI, 1.0)?;
    let lattice = TimeGrid::new(0.0, 1.0, 20)?;
    let triples = grid_triples(&lattice, 21);
    let candidate =
        composition_check(|a, b| ms_candidate_evolution(&p, CandidateDirection::Rotating, a, b), &triples);
    let constant =
        composition_check(|a, b| ms_candidate_evolution(&p, CandidateDirection::Constant, a, b), &triples);

    let model = MsSecondModelParams::from_regime(1.0, 10)?;
    let spec = ms_second_model(&model);
    let grid = TimeGrid::new(0.0, 1.0, 4000)?;
    let step_triples = grid_triples(&grid, 21);
    let run = propagate(&spec, &grid, &[])?;
    let stepping = composition_check(|a, b| run.evolution.between_times(a, b).expect("grid time"), &step_triples);
    let frames = build_frames(&spec, &grid)?;
    let table = coefficient_evolution(&build_effective(&frames, &connection(&frames)?)?)?;
    let effective = composition_check(|a, b| table.between_times(a, b).expect("grid time"), &step_triples);

    let pass = candidate > 0.1 && constant <= 1e-12 && stepping <= 1e-12 && effective <= 1e-10;
    Ok((
        pass,
        format!(
            "candidate {candidate:.3} (> 0.1), constant axis {constant:.1e}, stepping {stepping:.1e} (≤ 1e-12), effective-generator evolution {effective:.1e} (≤ 1e-10)"
        ),
    ))
}

/// `α(t)` with random harmonics of the drive frequency plus an integer
/// winding, so that `α(T) − α(0)` is a multiple of `2π`.
fn random_phase(rng: &mut ChaCha8Rng, omega: f64) -> PhaseFunction<f64> {
    let harmonics = 3;
    let sin = (1..=harmonics).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    let cos = (1..=harmonics).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    let winding = rng.gen_range(-1i32..=1) as f64;
    PhaseFunction::fourier(rng.gen_range(-PI..PI), sin, cos, omega, winding)
}

fn hidden_symmetry() -> Outcome {
    let (p, spec) = rotating(1.0, FRAC_PI_3, 0.5);
    let grid = TimeGrid::new(0.0, p.period(), 4096)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut state, mut hol) = (0.0f64, 0.0f64);
    for _ in 0..3 {
        let alphas = [random_phase(&mut rng, p.omega), random_phase(&mut rng, p.omega)];
        let report = gauge_transform_check(&spec, &grid, &alphas)?;
        state = state.max(report.state_deviation);
        hol = hol.max(report.holonomy_deviation);
    }
    let pass = state <= 1e-5 && hol <= 1e-8;
    Ok((pass, format!("state deviation {state:.3e} (≤ 1e-5), holonomy deviation {hol:.3e} (≤ 1e-8)")))
}

fn amplitude_equality() -> Outcome {
    let (p, spec) = rotating(1.0, FRAC_PI_3, 0.5);
    let grid = TimeGrid::new(0.0, p.period(), 4096)?;
    let rot = (0..2).map(|l| amplitude_equality_deviation(&spec, &grid, l)).collect::<Result<Vec<_>, _>>()?;
    let ms = ms_second_model(&MsSecondModelParams::from_regime(1.0, 10)?);
    let ms_grid = TimeGrid::new(0.0, 1.0, 1 << 16)?;
    let second = (0..2).map(|l| amplitude_equality_deviation(&ms, &ms_grid, l)).collect::<Result<Vec<_>, _>>()?;
    let (r, s) = (rot.iter().cloned().fold(0.0, f64::max), second.iter().cloned().fold(0.0, f64::max));
    Ok((r <= 1e-5 && s <= 1e-5, format!("rotating {r:.3e}, second model (ω₀ = 20ω) {s:.3e} (≤ 1e-5)")))
}

/// Max of `fine`, provided it shrank second-order from `coarse` or is at the
/// rounding floor.
fn second_order(coarse: f64, fine: f64, floor: f64) -> bool {
    fine <= floor || coarse / fine >= 3.0
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let (mut unitarity, mut norm, mut ortho) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..100 {
        let dim = 2 + case % 2;
        let spec = common::random_smooth_spec(&mut rng, dim);
        let psi0 = common::random_state(&mut rng, dim);
        let mut herm = [0.0; 2];
        let mut residual = [0.0; 2];
        for (i, steps) in [128usize, 256].into_iter().enumerate() {
            let grid = TimeGrid::new(0.0, TAU, steps)?;
            let run = propagate(&spec, &grid, std::slice::from_ref(&psi0))?;
            unitarity = unitarity.max(run.evolution.max_unitarity_defect());
            norm = norm.max(run.max_norm_defect());
            let frames = build_frames(&spec, &grid)?;
            ortho = ortho.max(frames.orthonormality_defect());
            let conn = finite_difference_connection(&frames)?;
            herm[i] = conn.hermiticity_defect();
            residual[i] = parallel_transport(&frames, &conn)?.residual;
        }
        if !second_order(herm[0], herm[1], 1e-11) {
            failures.push(format!("case {case}: connection hermiticity {:.2e} → {:.2e}", herm[0], herm[1]));
        }
        if !second_order(residual[0], residual[1], 1e-11) {
            failures.push(format!("case {case}: transport residual {:.2e} → {:.2e}", residual[0], residual[1]));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && unitarity <= 1e-12 && norm <= 1e-12 && ortho <= 1e-12 && elapsed < 30.0;
    let mut line = format!(
        "100 specs: unitarity {unitarity:.1e}, norm {norm:.1e}, orthonormality {ortho:.1e} (≤ 1e-12); O(dt²) failures {}; {elapsed:.2} s (< 30 s)",
        failures.len()
    );
    for f in failures.iter().take(3) {
        line.push_str("\n       ");
        line.push_str(f);
    }
    Ok((pass, line))
}

fn main() -> ExitCode {
    let setup = barred_setup();
    let criteria: Vec<(&str, Check)> = vec![
        ("exact-solution oracle", Box::new(exact_solution_oracle)),
        ("Berry-phase limit", Box::new(berry_phase_limit)),
        ("non-adiabatic limit", Box::new(non_adiabatic_limit)),
        ("effective-Hamiltonian collapse", Box::new(|| effective_collapse(setup.as_ref().map_err(Clone::clone)?))),
        ("barred exact identity", Box::new(|| exact_identity(setup.as_ref().map_err(Clone::clone)?))),
        ("composition law", Box::new(composition_law)),
        ("hidden local symmetry", Box::new(hidden_symmetry)),
        ("amplitude equality", Box::new(amplitude_equality)),
        ("property suites", Box::new(property_suites)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {detail} [{:.2} s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
