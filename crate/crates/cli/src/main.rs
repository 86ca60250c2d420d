use std::path::PathBuf;
use std::process::ExitCode;

use adiabatica::config::{Command, Format};
use adiabatica::{execute, load_config, Overrides};
use clap::{Args, Parser, Subcommand};

const CONFIG_HELP: &str = "\
Config keys (flat JSON object; unknown keys are rejected):
  model          rotating | ms-second | ms-barred | ms-candidate
  mu_B, theta, omega         rotating and ms-barred (base) parameters
  omega0 | n, tau            ms-second and ms-candidate (n sets omega0 = 2n*2pi/tau)
  direction      rotating | constant (ms-candidate axis)
  refine         substeps per half step of the ms-barred propagator table (default 16)
  level          0 or 1 (default 0; levels sorted by energy, rotating: 0 = aligned spin)
  grid           {\"t_start\", \"t_end\", \"steps\"} (defaults 0, one drive period, 4096; steps >= 16)
  epsilon        criteria threshold (default 0.1)
  energy_offset  shift of energies in r_level (default 0)
  output, format, seed, command, sweep {\"ratio_min\", \"ratio_max\", \"points\"}

Exit codes: 0 success, 1 I/O failure, 2 invalid config, 3 numerical failure.";

#[derive(Parser)]
#[command(name = "adiabatica", version, about = "Adiabaticity criteria, exact dynamics and geometric phases of driven two-level models", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Progress and timing on standard error
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Propagate v_level(0) and track populations and phases
    #[command(after_help = "CSV columns: t, psi_0_re, psi_0_im, psi_1_re, psi_1_im, pop_0, pop_1, phase_dynamical, phase_geometric\n  pop_m = |c_m|^2 on the instantaneous frame; phases accumulate int E_level dt and int A_level,level dt")]
    Simulate(Common),
    /// Evaluate the three diagonal-dominance ratios of the effective Hamiltonian
    #[command(after_help = "CSV columns: r_naive, r_gap, r_level, verdict_naive, verdict_gap, verdict_level, epsilon, energy_offset\n  ratios with a degenerate denominator are written as inf with a false verdict")]
    Criteria(Common),
    /// Phase split and holonomy per level, with a seeded random-rephasing check
    #[command(after_help = "CSV columns: level, dynamical, geometric, total, holonomy_re, holonomy_im, holonomy_phase, cyclic, endpoint_mismatch\n  geometric and total depend on the frame gauge; the holonomy does not")]
    Holonomy(Common),
    /// Trajectories of L(t) and the transport residual R(t)
    #[command(name = "ms-probe", after_help = "CSV columns: t, l_re, l_im, l_abs, l_minus_one_abs, residual")]
    MsProbe(Common),
    /// Maximum violation of U(t3,t1) = U(t3,t2) U(t2,t1) over grid triples
    #[command(name = "composition-check", after_help = "CSV columns: evolution, triples, max_deviation")]
    CompositionCheck(Common),
    /// Geometric phase per period of the rotating model across log-spaced omega/mu_B
    #[command(after_help = "CSV columns: ratio, alpha, geometric, geometric_wrapped, from_adiabatic, from_trivial\n  ratio = omega/mu_B at mu_B = 1; from_* are distances on the circle to pi(1+cos theta) and to 0")]
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Criteria(c) => (Command::Criteria, c),
        Cmd::Holonomy(c) => (Command::Holonomy, c),
        Cmd::MsProbe(c) => (Command::MsProbe, c),
        Cmd::CompositionCheck(c) => (Command::CompositionCheck, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
    };
    let overrides = Overrides { output: common.output, format: common.format, verbose: common.verbose };
    let result = load_config(&common.config).and_then(|cfg| execute(&cfg, command, &overrides));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adiabatica: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
