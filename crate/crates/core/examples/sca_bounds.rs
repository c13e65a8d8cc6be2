//! Evaluates the Taylor surrogates against the functions they bound.

use uav_ris_sca::sca::{power_upper_bounds, rate_lower_bound, velocity_lower_bound};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (g, lj) = (4.0e4, 1.0e4);
    println!("rate log2(1 + g/λ) and its tangent at λ_j = {lj}:");
    for l in [2.5e3f64, 5e3, 1e4, 2e4, 4e4] {
        println!("  λ {l:>8.0}  exact {:.5}  bound {:.5}", (1.0 + g / l).log2(), rate_lower_bound(g, l, lj)?);
    }
    let vj = [10.0, 10.0];
    println!("speed ‖v‖² and its tangent at v_j = {vj:?}:");
    for v in [[0.0, 0.0], [5.0, 12.0], [10.0, 10.0], [20.0, 0.0]] {
        println!("  v {v:?}  exact {:>6.1}  bound {:>6.1}", v[0] * v[0] + v[1] * v[1], velocity_lower_bound(v, vj));
    }
    println!("power log2(1 + κp) and its tangent at p_j = 1 (κ = 1):");
    for p in [0.0f64, 0.5, 1.0, 3.0, 10.0] {
        println!("  p {p:>5}  exact {:.5}  bound {:.5}", (1.0 + p).log2(), power_upper_bounds(p, 1.0, 1.0));
    }
    Ok(())
}
