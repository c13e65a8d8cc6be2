//! Loads a scenario from TOML text, runs it and writes the run files.
//!
//! `cargo run --release --example custom_scenario -- [out_dir]`

use std::path::PathBuf;

use uav_ris_sca::experiments::{parse_experiment, run_scenario};

const SCENARIO: &str = r#"
[scenario]
ue_positions = [[100.0, 400.0], [400.0, 100.0]]
ris_position = [250.0, 250.0]
r_min = [0.3, 0.6]
energy_budget_multiplier = 1.3

[solver]
max_iterations = 10
trust_radius = 80.0
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "out/custom_scenario".into());
    let exp = parse_experiment(SCENARIO)?;
    let r = run_scenario(&exp, &out)?;
    println!("status {}, P_total {:.4e} W, {} iterations", r.status().as_str(), r.p_total(), r.state.iteration);
    for entry in std::fs::read_dir(&out)? {
        println!("  {}", entry?.path().display());
    }
    Ok(())
}
