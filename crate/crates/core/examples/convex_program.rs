//! Builds a small conic program by hand: the closest point of a disc to an
//! outside target under a cubic cost, then prints the solution and the
//! lowered conic form.

use uav_ris_sca::convex::{solve, Affine, Constraint, ConvexProgram, SolveStatus};
use uav_ris_sca::scenario::SimControls;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = ConvexProgram::new();
    let x = p.free("x");
    let y = p.free("y");
    let d = p.nonneg("d");
    let c = p.nonneg("c");
    // inside the unit disc at the origin
    p.constrain("disc", Constraint::NormLe { terms: vec![x.into(), y.into()], rhs: Affine::constant(1.0) });
    // d bounds the distance to (3, 4)
    p.constrain("distance", Constraint::NormLe { terms: vec![x - 3.0, y - 4.0], rhs: d.into() });
    // c ≥ d³
    p.constrain("cube", Constraint::CubeLe { x: d.into(), t: c.into() });
    p.minimize(c.into());

    let r = solve(&p, &SimControls::default())?;
    assert_eq!(r.status, SolveStatus::Optimal, "{}", r.diagnostics());
    println!("x = {:.6}, y = {:.6}, distance = {:.6}, cost = {:.6}", r.value(x), r.value(y), r.value(d), r.value(c));
    println!("max residual {:.2e} after {} iterations", r.max_residual, r.iterations);
    println!("\n{}", p.dump_conic());
    Ok(())
}
