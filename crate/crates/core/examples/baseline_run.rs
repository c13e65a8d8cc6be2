//! Optimizes the baseline scenario and prints the per-iteration trace.
//!
//! Run with `cargo run --release --example baseline_run`.

use uav_ris_sca::sca::run_joint_optimization;
use uav_ris_sca::scenario::{baseline_scenario, SimControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, e) = baseline_scenario();
    let r = run_joint_optimization(&s, &e, &SimControls::default())?;

    println!("{:>3}  {:>14}  {:>12}  {:>8}", "j", "P_total (W)", "violation", "radius");
    for t in &r.trace {
        println!("{:>3}  {:>14.6e}  {:>12.3e}  {:>8.1}", t.iteration, t.p_total, t.max_violation, t.trust_radius);
    }
    println!("status        {}", r.status().as_str());
    println!("E_min         {:.1} J", r.min_energy);
    println!("energy used   {:.1} J of {:.1} J", r.trajectory.energy(&s, &e)?, r.energy_budget);
    println!("path length   {:.1} m", r.trajectory.path_length());
    println!("deviation     {:.1} m", r.trajectory.max_deviation(s.uav_start, s.uav_end));
    println!("mean LoS link power  {:.3e} W", r.powers.mean_direct());
    println!("mean RIS link power  {:.3e} W", r.powers.mean_ris());
    for (family, v) in &r.report.families {
        println!("  {family:<13} {v:.2e}");
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
