//! Dispatch from a validated config to the library operations.

use std::f64::consts::{PI, TAU};

use adiabatica_core::models::{
    barred_model, geometric_phase_point, log_spaced, ms_candidate_evolution, ms_second_model, rotating_model,
    CandidateDirection, MsSecondModelParams, RotatingModelParams,
};
use adiabatica_core::spectral::cumulative_trapezoid;
use adiabatica_core::{
    build_effective, build_frames, coefficient_evolution, composition_check, connection, criteria,
    gauge_transform_check, grid_triples, holonomy, ms_inconsistency_probe, phase_split, propagate, PhaseFunction,
    Spec, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig, ModelKind};
use crate::output::{Cell, Report};

type Result<T> = adiabatica_core::Result<T>;

fn grid(cfg: &ExperimentConfig) -> Result<TimeGrid<f64>> {
    let (t0, t1, steps) = cfg.grid_bounds();
    TimeGrid::new(t0, t1, steps)
}

fn rotating_params(cfg: &ExperimentConfig) -> Result<RotatingModelParams<f64>> {
    RotatingModelParams::new(cfg.mu_b.unwrap_or(f64::NAN), cfg.theta.unwrap_or(f64::NAN), cfg.omega.unwrap_or(f64::NAN))
}

fn ms_params(cfg: &ExperimentConfig) -> Result<MsSecondModelParams<f64>> {
    let tau = cfg.tau.unwrap_or(f64::NAN);
    match cfg.n {
        Some(n) => MsSecondModelParams::from_regime(tau, n),
        None => MsSecondModelParams::new(cfg.omega0.unwrap_or(f64::NAN), tau),
    }
}

/// The Hamiltonian named by the config, built for use on `grid`.
fn spec(cfg: &ExperimentConfig, grid: &TimeGrid<f64>) -> Result<Spec> {
    match cfg.model {
        Some(ModelKind::Rotating) => Ok(rotating_model(&rotating_params(cfg)?)),
        Some(ModelKind::MsSecond) => Ok(ms_second_model(&ms_params(cfg)?)),
        Some(ModelKind::MsBarred) => {
            let base = rotating_model(&rotating_params(cfg)?);
            Ok(barred_model(&base, grid, cfg.refine())?.spec().clone())
        }
        Some(ModelKind::MsCandidate) | None => {
            Err(adiabatica_core::Error::InvalidParameter("model has no Hamiltonian".into()))
        }
    }
}

/// For the probe, which analyses the base dynamics of the barred model.
fn base_spec(cfg: &ExperimentConfig, grid: &TimeGrid<f64>) -> Result<Spec> {
    match cfg.model {
        Some(ModelKind::MsBarred) => Ok(rotating_model(&rotating_params(cfg)?)),
        _ => spec(cfg, grid),
    }
}

fn header(cfg: &ExperimentConfig, command: Command, grid: Option<&TimeGrid<f64>>) -> Report {
    let mut r = Report::new(&command.to_string());
    if let Some(m) = cfg.model {
        r.meta("model", m.to_string());
    }
    if let Some(g) = grid {
        r.meta("t_start", g.t_start).meta("t_end", g.t_end).meta("steps", g.steps);
    }
    r
}

pub fn run(cfg: &ExperimentConfig, command: Command) -> Result<Report> {
    match command {
        Command::Simulate => simulate(cfg),
        Command::Criteria => criteria_report(cfg),
        Command::Holonomy => holonomy_report(cfg),
        Command::MsProbe => probe(cfg),
        Command::CompositionCheck => composition(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = grid(cfg)?;
    let spec = spec(cfg, &grid)?;
    let frames = build_frames(&spec, &grid)?;
    let conn = connection(&frames)?;
    let level = cfg.level();
    let run = propagate(&spec, &grid, &[frames.vector(0, level)])?;
    let coefficients = run.coefficients(&frames)?;
    let dynamical = cumulative_trapezoid(&frames.level_energies(level), grid.dt());
    let geometric = cumulative_trapezoid(&conn.diagonal(level), grid.dt());

    let mut r = header(cfg, Command::Simulate, Some(&grid));
    r.meta("level", level).meta("gauge", frames.gauge.to_string());
    r.columns(&[
        "t", "psi_0_re", "psi_0_im", "psi_1_re", "psi_1_im", "pop_0", "pop_1", "phase_dynamical", "phase_geometric",
    ]);
    for k in 0..grid.len() {
        let psi = &run.states[0][k];
        let c = &coefficients[0][k];
        r.row(vec![
            grid.time(k).into(),
            psi[0].re.into(),
            psi[0].im.into(),
            psi[1].re.into(),
            psi[1].im.into(),
            c[0].norm_sqr().into(),
            c[1].norm_sqr().into(),
            dynamical[k].into(),
            geometric[k].into(),
        ]);
    }
    Ok(r)
}

fn criteria_report(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = grid(cfg)?;
    let spec = spec(cfg, &grid)?;
    let frames = build_frames(&spec, &grid)?;
    let eff = build_effective(&frames, &connection(&frames)?)?;
    let rep = criteria(&eff, cfg.epsilon(), cfg.energy_offset())?;
    let mut r = header(cfg, Command::Criteria, Some(&grid));
    r.meta("gauge", frames.gauge.to_string()).meta("report", &rep);
    r.columns(&[
        "r_naive", "r_gap", "r_level", "verdict_naive", "verdict_gap", "verdict_level", "epsilon", "energy_offset",
    ]);
    r.row(vec![
        rep.r_naive.into(),
        rep.r_gap.into(),
        rep.r_level.into(),
        rep.verdicts.naive.into(),
        rep.verdicts.gap.into(),
        rep.verdicts.level.into(),
        rep.epsilon.into(),
        rep.energy_offset.into(),
    ]);
    Ok(r)
}

/// Random smooth rephasing periodic over `duration` up to an integer winding.
fn random_phase(rng: &mut ChaCha8Rng, duration: f64) -> PhaseFunction<f64> {
    let sin = (1..=3).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    let cos = (1..=3).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    let winding = f64::from(rng.gen_range(-1i32..=1));
    PhaseFunction::fourier(rng.gen_range(-PI..PI), sin, cos, TAU / duration, winding)
}

fn holonomy_report(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = grid(cfg)?;
    let spec = spec(cfg, &grid)?;
    let frames = build_frames(&spec, &grid)?;
    let conn = connection(&frames)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let (mut state_dev, mut hol_dev) = (0.0f64, 0.0f64);
    for _ in 0..3 {
        let alphas: Vec<_> = (0..spec.dim()).map(|_| random_phase(&mut rng, grid.duration())).collect();
        let check = gauge_transform_check(&spec, &grid, &alphas)?;
        state_dev = state_dev.max(check.state_deviation);
        hol_dev = hol_dev.max(check.holonomy_deviation);
    }

    let mut r = header(cfg, Command::Holonomy, Some(&grid));
    r.meta("gauge", frames.gauge.to_string())
        .meta("gauge_dependent", ["geometric", "total"])
        .meta("gauge_invariant", ["holonomy_re", "holonomy_im", "holonomy_phase"])
        .meta("seed", cfg.seed())
        .meta("gauge_check_state_deviation", state_dev)
        .meta("gauge_check_holonomy_deviation", hol_dev);
    r.columns(&[
        "level", "dynamical", "geometric", "total", "holonomy_re", "holonomy_im", "holonomy_phase", "cyclic",
        "endpoint_mismatch",
    ]);
    for level in 0..frames.dim() {
        let split = phase_split(&frames, &conn, level)?;
        let h = holonomy(&frames, &conn, level)?;
        r.row(vec![
            level.into(),
            split.dynamical.into(),
            split.geometric.into(),
            split.total.into(),
            h.re.into(),
            h.im.into(),
            h.phase().into(),
            h.cyclic.into(),
            h.endpoint_mismatch.into(),
        ]);
    }
    Ok(r)
}

fn probe(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = grid(cfg)?;
    let spec = base_spec(cfg, &grid)?;
    let rep = ms_inconsistency_probe(&spec, &grid, cfg.level())?;
    let mut r = header(cfg, Command::MsProbe, Some(&grid));
    r.meta("level", rep.level).meta("convention", &rep.convention);
    r.columns(&["t", "l_re", "l_im", "l_abs", "l_minus_one_abs", "residual"]);
    for (k, &t) in rep.times.iter().enumerate() {
        let l = rep.l_value(k);
        r.row(vec![t.into(), l.re.into(), l.im.into(), l.norm().into(), (l - 1.0).norm().into(), rep.residual[k].into()]);
    }
    Ok(r)
}

fn composition(cfg: &ExperimentConfig) -> Result<Report> {
    let grid = grid(cfg)?;
    let triples = grid_triples(&grid, 21);
    let mut r = header(cfg, Command::CompositionCheck, Some(&grid));
    r.columns(&["evolution", "triples", "max_deviation"]);
    if cfg.model == Some(ModelKind::MsCandidate) {
        let p = ms_params(cfg)?;
        let direction = cfg.direction.unwrap_or(CandidateDirection::Rotating);
        let dev = composition_check(|a, b| ms_candidate_evolution(&p, direction, a, b), &triples);
        let name = match direction {
            CandidateDirection::Rotating => "candidate_rotating_axis",
            CandidateDirection::Constant => "candidate_constant_axis",
        };
        r.row(vec![name.into(), triples.len().into(), dev.into()]);
        return Ok(r);
    }
    let spec = spec(cfg, &grid)?;
    let run = propagate(&spec, &grid, &[])?;
    let frames = build_frames(&spec, &grid)?;
    let table = coefficient_evolution(&build_effective(&frames, &connection(&frames)?)?)?;
    let lookup = |t| grid.index_of(t).expect("triples lie on the grid");
    let stepping = composition_check(|a, b| run.evolution.between(lookup(a), lookup(b)), &triples);
    let effective = composition_check(|a, b| table.between(lookup(a), lookup(b)), &triples);
    r.row(vec!["stepping_propagator".into(), triples.len().into(), stepping.into()]);
    r.row(vec!["effective_generator".into(), triples.len().into(), effective.into()]);
    Ok(r)
}

fn sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let s = cfg.sweep.expect("validated sweep block");
    let theta = cfg.theta.unwrap_or(f64::NAN);
    let ratios = log_spaced(s.ratio_min, s.ratio_max, s.points)?;
    let points = ratios.par_iter().map(|&x| geometric_phase_point(theta, x)).collect::<Result<Vec<_>>>()?;
    let mut r = header(cfg, Command::Sweep, None);
    r.meta("model", "rotating").meta("theta", theta).meta("mu_B", 1.0).meta("level", "plus");
    r.columns(&["ratio", "alpha", "geometric", "geometric_wrapped", "from_adiabatic", "from_trivial"]);
    for p in points {
        r.row(vec![
            Cell::from(p.ratio),
            p.alpha.into(),
            p.geometric.into(),
            p.geometric_wrapped.into(),
            p.from_adiabatic.into(),
            p.from_trivial.into(),
        ]);
    }
    Ok(r)
}
