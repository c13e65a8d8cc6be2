//! Compares the cascade gain under the closed-form co-phasing policy with
//! random RIS phases and with all phases at zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uav_ris_sca::geometry::{
    beamformed_gain, build_channels, cascade_channel, link_angles, mrt_beamformer, optimal_ris_phase, PhaseMatrix,
};
use uav_ris_sca::scenario::baseline_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, _) = baseline_scenario();
    let uav = [300.0, 120.0];
    let k = 1;
    let ch = build_channels(&s, uav);
    let m = s.ris_array.elements();
    let gain = |phases: &[f64]| -> Result<f64, uav_ris_sca::error::Error> {
        let c = cascade_channel(&ch, &PhaseMatrix::from_phases(phases), k)?;
        Ok(beamformed_gain(&c, &mrt_beamformer(&c)))
    };

    let aligned = gain(&optimal_ris_phase(&link_angles(&s, uav), &s, k))?;
    let zero = gain(&vec![0.0; m])?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let best_random = (0..200)
        .map(|_| gain(&(0..m).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);

    println!("co-phased        {aligned:.6e}");
    println!("best of 200 rand {best_random:.6e}  ({:.1}% of co-phased)", 100.0 * best_random / aligned);
    println!("all zero         {zero:.6e}");
    Ok(())
}
