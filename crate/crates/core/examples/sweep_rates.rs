//! Sweeps UE counts and rate requirements and writes the CSV/SVG outputs.
//!
//! `cargo run --release --example sweep_rates -- [out_dir]`

use std::path::PathBuf;

use uav_ris_sca::experiments::{sweep_users_rates, Experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "out/sweep_rates".into());
    let mut exp = Experiment::baseline();
    exp.sweep.ue_counts = vec![1, 3, 5];
    let cells = sweep_users_rates(&exp, &out, 0)?;
    println!("{:>2}  {:>6}  {:<10}  {:>12}  {:>10}", "K", "R_min", "status", "P_total", "deviation");
    for c in &cells {
        println!(
            "{:>2}  {:>6}  {:<10}  {:>12.4e}  {:>8.1} m",
            c.scenario.num_ues(),
            c.scenario.r_min[0],
            c.status.as_str(),
            c.p_total,
            c.deviation
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
