//! Command-line front end for single runs and the three sweeps.
//!
//! Exit codes: 0 success, 1 infeasible, 2 input error, 3 solver failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uav_ris_sca::error::Error;
use uav_ris_sca::experiments::{
    load_experiment, run_scenario, sweep_energy_budget, sweep_ris_positions, sweep_users_rates, CellRecord,
    Experiment, Overrides,
};
use uav_ris_sca::sca::ScaStatus;

#[derive(Parser)]
#[command(version, about = "Joint UAV trajectory, RIS phase and power optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one scenario and write its CSVs and SVG.
    Run(Common),
    /// Sweep UE counts and rate requirements.
    SweepUsers(Common),
    /// Sweep RIS positions over seeded random rate requirements.
    SweepRis(Common),
    /// Sweep energy-budget multipliers.
    SweepEnergy(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file; the baseline scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for UE placement and rate draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Outer iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative power-decrease convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

const INFEASIBLE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const SOLVER_FAILURE: u8 = 3;

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Backend(_) => ExitCode::from(SOLVER_FAILURE),
        _ => ExitCode::from(INPUT_ERROR),
    }
}

fn load(c: &Common) -> Result<Experiment, Error> {
    let mut exp = match &c.config {
        Some(p) => load_experiment(p)?,
        None => Experiment::baseline(),
    };
    Overrides { seed: c.seed, max_iter: c.max_iter, tol: c.tol }.apply(&mut exp)?;
    Ok(exp)
}

fn report_cells(cells: &[CellRecord]) {
    for r in cells {
        eprintln!("{:<16} {:<15} P_total {:.6e} W", r.label, r.status.as_str(), r.p_total);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Run(c) | Command::SweepUsers(c) | Command::SweepRis(c) | Command::SweepEnergy(c)) = &cli.command;
    let exp = match load(c) {
        Ok(exp) => exp,
        Err(e) => return exit_for(&e),
    };
    let cells = match &cli.command {
        Command::Run(_) => {
            return match run_scenario(&exp, &c.out) {
                Ok(r) => {
                    eprintln!("status {} P_total {:.6e} W after {} iterations", r.status().as_str(), r.p_total(), r.state.iteration);
                    for w in &r.warnings {
                        eprintln!("warning: {w}");
                    }
                    if let Some(m) = &r.message {
                        eprintln!("{m}");
                    }
                    match r.status() {
                        ScaStatus::Converged | ScaStatus::MaxIterations => ExitCode::SUCCESS,
                        ScaStatus::Infeasible => ExitCode::from(INFEASIBLE),
                        ScaStatus::SolverFailure => ExitCode::from(SOLVER_FAILURE),
                    }
                }
                Err(e) => exit_for(&e),
            };
        }
        Command::SweepUsers(_) => sweep_users_rates(&exp, &c.out, c.jobs),
        Command::SweepRis(_) => sweep_ris_positions(&exp, &c.out, c.jobs),
        Command::SweepEnergy(_) => sweep_energy_budget(&exp, &c.out, c.jobs),
    };
    match cells {
        Ok(cells) => {
            report_cells(&cells);
            ExitCode::SUCCESS
        }
        Err(e) => exit_for(&e),
    }
}
