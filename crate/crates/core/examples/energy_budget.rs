//! Sweeps the energy-budget multiplier and reports path lengths.
//!
//! `cargo run --release --example energy_budget -- [out_dir]`

use std::path::PathBuf;

use uav_ris_sca::experiments::{sweep_energy_budget, Experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "out/energy_budget".into());
    let mut exp = Experiment::baseline();
    exp.sweep.multipliers = vec![1.0, 1.02, 1.05, 1.2, 1.5, 2.0];
    for c in sweep_energy_budget(&exp, &out, 0)? {
        println!(
            "x{:<5} path {:>7.1} m  energy {:>7.1} / {:>7.1} J  {}",
            c.scenario.energy_budget_multiplier,
            c.path_length,
            c.energy,
            c.energy_budget,
            c.status.as_str()
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
