//! Trajectory step with powers and RIS phases held fixed.
//!
//! Internally lengths are expressed in units of `LEN` meters, speeds in
//! units of `SPEED` m/s and the induced-power auxiliary in units of `WATT`
//! so that the conic program is well scaled.

use crate::convex::{solve, Affine, Constraint, ConvexProgram, SolveStatus, Var};
use crate::energy::straight_line_min_energy;
use crate::error::Result;
use crate::link::{snr_numerators, PowerSchedule};
use crate::scenario::{EnergyParams, ScenarioConfig, SimControls, TrajectoryObjective};

use super::bounds::rate_tangent;
use super::check::kinematic_violations;
use super::{init_straight_trajectory, ScaState, Trajectory};

const LEN: f64 = 100.0;
const SPEED: f64 = 10.0;
const WATT: f64 = 100.0;
/// Largest residual of a solver-converged point still worth repairing.
const INEXACT_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStep {
    Solved {
        trajectory: Trajectory,
        state: ScaState,
        /// Auxiliary objective reported by the solver.
        objective: f64,
        /// False when the solve missed `solver_tol` and its point was
        /// repaired against the exact constraints.
        exact: bool,
        /// Weight θ of the previous iterate in the repaired velocities.
        blend: f64,
    },
    Infeasible {
        families: Vec<String>,
        detail: String,
    },
    Failed(String),
}

struct Slot {
    z: [Var; 2],
    /// `(direct, ris)` slacks per UE, interior waypoints only.
    lambda: Vec<(Var, Var)>,
    mu: Option<Var>,
}

/// Affine tangent of `log2(1 + ĝ/λ)` in the scaled slack `λ' = λ / LEN²`.
fn tangent(hat_gamma: f64, lambda_j: f64, slack: Var) -> Result<Affine> {
    let (value, slope) = rate_tangent(hat_gamma, lambda_j)?;
    Ok(slack * (slope * LEN * LEN) + (value - slope * lambda_j))
}

/// Solves the convexified trajectory problem around `traj_j` with the
/// powers `powers` held fixed. A budget no larger than the straight-line
/// energy (within `solver_tol`) returns the straight line directly.
#[allow(clippy::too_many_arguments)]
pub fn solve_trajectory_subproblem(
    s: &ScenarioConfig,
    e: &EnergyParams,
    controls: &SimControls,
    state: &ScaState,
    traj_j: &Trajectory,
    powers: &PowerSchedule,
    energy_budget: f64,
    trust_radius: f64,
) -> Result<TrajectoryStep> {
    let e_min = straight_line_min_energy(s, e)?;
    if energy_budget <= e_min * (1.0 + controls.solver_tol) {
        let (trajectory, tight) = init_straight_trajectory(s, e)?;
        let state = ScaState { iteration: state.iteration, p_total_history: state.p_total_history.clone(), status: state.status, ..tight };
        return Ok(TrajectoryStep::Solved { objective: 0.0, trajectory, state, exact: true, blend: 0.0 });
    }

    let n_steps = s.n_steps;
    let k_n = s.num_ues();
    let tau = s.tau;
    let mut p = ConvexProgram::new();

    let ris = s.ris_point();
    let bs = s.bs_point();
    let h_u = s.uav_height;
    let mut slots = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        let z = [p.free(format!("z[{n}].x")), p.free(format!("z[{n}].y"))];
        let interior = n > 0 && n < n_steps;
        let mut lambda = Vec::new();
        let mut mu = None;
        if interior {
            let rel = |v: Var, c: f64| Affine::from(v) - c / LEN;
            for k in 0..k_n {
                let ue = s.ue_point(k);
                let ld = p.free(format!("lambda_direct[{k}][{n}]"));
                let lr = p.free(format!("lambda_ris[{k}][{n}]"));
                p.constrain(
                    "direct_slack",
                    Constraint::SquaredNormLe {
                        terms: vec![rel(z[0], ue[0]), rel(z[1], ue[1])],
                        rhs: ld - (h_u / LEN).powi(2),
                    },
                );
                p.constrain(
                    "ris_slack",
                    Constraint::SquaredNormLe {
                        terms: vec![rel(z[0], ris[0]), rel(z[1], ris[1])],
                        rhs: lr - ((h_u - ris[2]) / LEN).powi(2),
                    },
                );
                lambda.push((ld, lr));
            }
            let m = p.free(format!("mu[{n}]"));
            p.constrain(
                "bs_slack",
                Constraint::SquaredNormLe {
                    terms: vec![rel(z[0], bs[0]), rel(z[1], bs[1])],
                    rhs: m - ((h_u - bs[2]) / LEN).powi(2),
                },
            );
            mu = Some(m);
            let zj = traj_j.z[n];
            p.constrain(
                "trust_region",
                Constraint::NormLe {
                    terms: vec![rel(z[0], zj[0]), rel(z[1], zj[1])],
                    rhs: Affine::constant(trust_radius / LEN),
                },
            );
        }
        slots.push(Slot { z, lambda, mu });
    }
    for (c, (family, target)) in [("start", s.uav_start), ("end", s.uav_end)].into_iter().enumerate() {
        let z = slots[if c == 0 { 0 } else { n_steps }].z;
        p.eq(family, z[0] - target[0] / LEN);
        p.eq(family, z[1] - target[1] / LEN);
    }

    // Rate and backhaul surrogates at interior waypoints.
    for (n, slot) in slots.iter().enumerate() {
        let Some(mu) = slot.mu else { continue };
        let num = snr_numerators(s, &powers.slots[n]);
        let mut aggregate = Affine::default();
        for k in 0..k_n {
            let (ld, lr) = slot.lambda[k];
            let mut sum = Affine::default();
            for (g, lj, var) in [
                (num.direct[k], state.lambda_direct[k][n], ld),
                (num.ris[k], state.lambda_ris[k][n], lr),
            ] {
                if g > 0.0 {
                    sum = sum + tangent(g, lj, var)?;
                }
            }
            p.le("rate", s.r_min[k], sum.clone());
            aggregate = aggregate + sum;
        }
        p.le("backhaul", aggregate, tangent(num.bs, state.mu[n], mu)?);
    }

    // Kinematics and propulsion.
    let c2 = e.blade_quadratic() * SPEED * SPEED;
    let c3 = e.parasite_cubic() * SPEED.powi(3);
    let induced = e.induced_numerator() / (SPEED * WATT);
    let mut energy = Affine::constant(e.blade_power * tau * n_steps as f64);
    let mut velocities = Vec::with_capacity(n_steps);
    for n in 0..n_steps {
        let v = [p.free(format!("v[{n}].x")), p.free(format!("v[{n}].y"))];
        let pi = p.add_var(format!("pi[{n}]"), Some(s.pi_min / SPEED), None);
        let q = p.free(format!("speed_sq[{n}]"));
        let w = p.free(format!("speed[{n}]"));
        let cube = p.free(format!("speed_cube[{n}]"));
        let r = p.free(format!("induced[{n}]"));
        let (za, zb) = (slots[n].z, slots[n + 1].z);
        for d in 0..2 {
            p.eq("dynamics", zb[d] - za[d] - v[d] * (tau * SPEED / LEN));
        }
        p.constrain(
            "speed",
            Constraint::NormLe { terms: vec![v[0].into(), v[1].into()], rhs: Affine::constant(s.v_max / SPEED) },
        );
        p.constrain("speed_aux", Constraint::NormLe { terms: vec![v[0].into(), v[1].into()], rhs: w.into() });
        p.constrain("speed_aux", Constraint::SquaredNormLe { terms: vec![v[0].into(), v[1].into()], rhs: q.into() });
        p.constrain("speed_aux", Constraint::CubeLe { x: w.into(), t: cube.into() });
        p.constrain("speed_aux", Constraint::Reciprocal { c: induced, x: pi.into(), t: r.into() });
        let vj = traj_j.v[n];
        let (vjx, vjy) = (vj[0] / SPEED, vj[1] / SPEED);
        let lin = v[0] * (2.0 * vjx) + v[1] * (2.0 * vjy) - (vjx * vjx + vjy * vjy);
        p.constrain("speed_slack", Constraint::SquaredNormLe { terms: vec![pi.into()], rhs: lin });
        energy = energy + (q * (c2 * tau)) + (r * (WATT * tau)) + (cube * (c3 * tau));
        velocities.push(v);
    }
    for n in 1..n_steps {
        let (a, b) = (velocities[n - 1], velocities[n]);
        p.constrain(
            "acceleration",
            Constraint::NormLe {
                terms: vec![b[0] - a[0], b[1] - a[1]],
                rhs: Affine::constant(s.v_acc * tau / SPEED),
            },
        );
    }
    p.le("energy", energy.clone() * (1.0 / e_min), energy_budget / e_min);

    let objective = match controls.objective {
        TrajectoryObjective::Propulsion => energy * (1.0 / e_min),
        TrajectoryObjective::SlackSum => {
            let mut obj = Affine::default();
            let mut count = 0usize;
            for slot in &slots {
                for &(ld, lr) in &slot.lambda {
                    obj = obj + ld * controls.weight_direct + lr * controls.weight_ris;
                    count += 2;
                }
                if let Some(m) = slot.mu {
                    obj = obj + m * controls.weight_bs;
                    count += 1;
                }
            }
            obj * (1.0 / count.max(1) as f64)
        }
    };
    p.minimize(objective);

    let res = solve(&p, controls)?;
    let mut exact = true;
    match res.status {
        SolveStatus::Optimal => {}
        SolveStatus::NumericalFailure if res.solver_converged && res.max_residual <= INEXACT_LIMIT => {
            exact = false;
        }
        SolveStatus::Infeasible => {
            return Ok(TrajectoryStep::Infeasible {
                families: res.infeasible_families.clone(),
                detail: res.diagnostics(),
            })
        }
        SolveStatus::NumericalFailure => {
            return Ok(TrajectoryStep::Failed(format!("trajectory step: {}", res.diagnostics())))
        }
    }

    // Rebuild positions from the velocities so the dynamics hold exactly,
    // spreading the endpoint residual evenly over the slots.
    let mut v: Vec<[f64; 2]> = velocities
        .iter()
        .map(|vn| [res.value(vn[0]) * SPEED, res.value(vn[1]) * SPEED])
        .collect();
    let drift = Trajectory::from_velocities(s.uav_start, v.clone(), tau);
    let end = drift.z[n_steps];
    let fix = [
        (s.uav_end[0] - end[0]) / (n_steps as f64 * tau),
        (s.uav_end[1] - end[1]) / (n_steps as f64 * tau),
    ];
    for vn in &mut v {
        vn[0] += fix[0];
        vn[1] += fix[1];
    }
    let Some((trajectory, blend)) = repair(s, e, v, traj_j, energy_budget, controls.solver_tol) else {
        return Ok(TrajectoryStep::Failed(format!(
            "trajectory step: no blend with the previous iterate meets the exact constraints; {}",
            res.diagnostics()
        )));
    };

    let tight = ScaState::tight(s, &trajectory);
    let state = ScaState {
        iteration: state.iteration,
        p_total_history: state.p_total_history.clone(),
        status: state.status,
        ..tight
    };
    Ok(TrajectoryStep::Solved { trajectory, state, objective: res.objective, exact, blend })
}

fn path(s: &ScenarioConfig, v: Vec<[f64; 2]>) -> Trajectory {
    let mut t = Trajectory::from_velocities(s.uav_start, v, s.tau);
    t.z[s.n_steps] = s.uav_end;
    t
}

/// Smallest θ ∈ [0, 1] such that `(1 − θ)·v + θ·v_j` meets the exact
/// kinematic and energy constraints. Those constraints are convex in the
/// velocities, so feasibility is monotone along the segment.
fn repair(
    s: &ScenarioConfig,
    e: &EnergyParams,
    v: Vec<[f64; 2]>,
    traj_j: &Trajectory,
    energy_budget: f64,
    tol: f64,
) -> Option<(Trajectory, f64)> {
    let ok = |t: &Trajectory| kinematic_violations(s, e, t, energy_budget).iter().all(|f| f.1 <= tol);
    let blend = |theta: f64| {
        let mixed = v
            .iter()
            .zip(&traj_j.v)
            .map(|(a, b)| [(1.0 - theta) * a[0] + theta * b[0], (1.0 - theta) * a[1] + theta * b[1]])
            .collect();
        path(s, mixed)
    };
    let direct = blend(0.0);
    if ok(&direct) {
        return Some((direct, 0.0));
    }
    if !ok(&blend(1.0)) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(&blend(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((blend(hi), hi))
}
