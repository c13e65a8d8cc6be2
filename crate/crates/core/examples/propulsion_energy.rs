//! Tabulates rotary-wing propulsion power against speed and the energy
//! budget of the baseline flight.

use uav_ris_sca::energy::{energy_budget, propulsion_power, straight_line_min_energy, straight_line_speed};
use uav_ris_sca::scenario::baseline_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, e) = baseline_scenario();
    println!("{:>8}  {:>10}", "v (m/s)", "P (W)");
    for v in [0.1, 2.0, 5.0, 10.0, 14.14, 18.0, 20.0, 30.0] {
        println!("{v:>8.2}  {:>10.3}", propulsion_power(v, s.pi_min, &e)?);
    }
    let (best, p_best) = (1..=300)
        .map(|i| i as f64 * 0.1)
        .map(|v| (v, propulsion_power(v, s.pi_min, &e).unwrap_or(f64::INFINITY)))
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    println!("minimum-power speed about {best:.1} m/s ({p_best:.2} W)");
    println!("straight-line speed {:.3} m/s", straight_line_speed(&s));
    println!("E_min  {:.2} J", straight_line_min_energy(&s, &e)?);
    println!("budget {:.2} J (x{})", energy_budget(&s, &e)?, s.energy_budget_multiplier);
    Ok(())
}
