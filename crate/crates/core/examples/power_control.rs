//! Solves the power subproblem on the straight-line path and checks a
//! single-UE case against the closed form (2^R - 1) / κ.

use uav_ris_sca::geometry::RisPhaseProfile;
use uav_ris_sca::link::kappa_coefficients;
use uav_ris_sca::sca::{init_straight_trajectory, solve_power_subproblem, PowerSchedule, PowerStep, SlotPowers};
use uav_ris_sca::scenario::{baseline_scenario, SimControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (mut s, e) = baseline_scenario();
    let controls = SimControls::default();
    for k in [3usize, 1] {
        s.set_ues(vec![[20.0, 450.0], [250.0, 0.0], [500.0, 200.0]][..k].to_vec());
        let (traj, _) = init_straight_trajectory(&s, &e)?;
        let phases = RisPhaseProfile::optimal_along(&s, &traj.z);
        let zero = PowerSchedule { slots: vec![SlotPowers::zeros(k); traj.z.len()] };
        match solve_power_subproblem(&s, &traj, &phases, &zero, &controls)? {
            PowerStep::Solved { powers, inner_iterations } => {
                println!("K = {k}: P_total {:.6e} W after {inner_iterations} inner iterations", powers.total());
                let n = 25;
                let kappa = kappa_coefficients(&s, traj.z[n]);
                let slot = &powers.slots[n];
                println!("  slot {n}: p_bs {:.6e}  (closed form {:.6e})", slot.bs, (s.r_min.iter().sum::<f64>().exp2() - 1.0) / kappa.bs);
                for i in 0..k {
                    println!(
                        "  UE{}: direct {:.6e}  ris {:.6e}  single-link closed form {:.6e}",
                        i + 1,
                        slot.direct[i],
                        slot.ris[i],
                        (s.r_min[i].exp2() - 1.0) / kappa.direct[i]
                    );
                }
            }
            other => println!("K = {k}: {other:?}"),
        }
    }
    Ok(())
}
