//! Builds the line-of-sight channels at one UAV position and compares the
//! MRT-beamformed gains with their closed forms.

use uav_ris_sca::geometry::{
    beamformed_gain, build_channels, cascade_channel, mrt_beamformer, mrt_effective_gains, optimal_ris_phase,
    link_angles, PhaseMatrix,
};
use uav_ris_sca::scenario::baseline_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (s, _) = baseline_scenario();
    let uav = [180.0, 240.0];
    let ch = build_channels(&s, uav);
    let closed = mrt_effective_gains(&ch.distances, &s);

    let bu = beamformed_gain(&ch.h_bu, &mrt_beamformer(&ch.h_bu));
    println!("BS -> UAV     |h^H w| = {bu:.6e}   closed form {:.6e}", closed.bu);

    let angles = link_angles(&s, uav);
    for k in 0..s.num_ues() {
        let direct = beamformed_gain(&ch.h_ug[k], &mrt_beamformer(&ch.h_ug[k]));
        let phase = PhaseMatrix::from_phases(&optimal_ris_phase(&angles, &s, k));
        let cascade = cascade_channel(&ch, &phase, k)?;
        let via_ris = beamformed_gain(&cascade, &mrt_beamformer(&cascade));
        println!(
            "UE{} direct  {direct:.6e} ({:.6e})   via RIS {via_ris:.6e} ({:.6e})",
            k + 1,
            closed.ug[k],
            closed.urg[k]
        );
    }
    Ok(())
}
