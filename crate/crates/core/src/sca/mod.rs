//! Successive convex approximation of the joint trajectory, RIS phase and
//! power problem.
//!
//! The outer loop alternates two convex subproblems: a trajectory step with
//! powers held fixed ([`solve_trajectory_subproblem`]) and a power step on
//! the fixed path ([`solve_power_subproblem`]). RIS phases always follow the
//! closed-form co-phasing rule, so they are recomputed rather than optimized.

mod bounds;
mod check;
mod joint;
mod power;
mod trajectory;

pub use bounds::{
    capacity_lower_bound, power_upper_bounds, rate_lower_bound, rate_tangent, velocity_lower_bound,
};
pub use check::{check_constraints, ConstraintReport};
pub use joint::{run_joint_optimization, JointResult, TraceRecord};
pub use power::{minimum_uav_power, solve_power_subproblem, PowerStep};
pub use trajectory::{solve_trajectory_subproblem, TrajectoryStep};

pub use crate::link::{PowerSchedule, SlotPowers};

use crate::energy::{straight_line_min_energy, velocity_energy};
use crate::error::{Error, Result};
use crate::geometry::dist3;
use crate::scenario::{dist2, EnergyParams, ScenarioConfig};

/// UAV path: `z` has N + 1 waypoints, `v[n]` moves `z[n]` to `z[n + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub z: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
    pub tau: f64,
}

impl Trajectory {
    /// Integrates `v` from `start`.
    pub fn from_velocities(start: [f64; 2], v: Vec<[f64; 2]>, tau: f64) -> Self {
        let mut z = Vec::with_capacity(v.len() + 1);
        z.push(start);
        for (n, vn) in v.iter().enumerate() {
            let p = z[n];
            z.push([p[0] + vn[0] * tau, p[1] + vn[1] * tau]);
        }
        Self { z, v, tau }
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.v.iter().map(|v| v[0].hypot(v[1])).collect()
    }

    pub fn path_length(&self) -> f64 {
        self.z.windows(2).map(|w| dist2(w[0], w[1])).sum()
    }

    pub fn energy(&self, s: &ScenarioConfig, e: &EnergyParams) -> Result<f64> {
        velocity_energy(&self.v, self.tau, s.pi_min, e)
    }

    /// Largest distance of any waypoint from the segment `a`–`b`.
    pub fn max_deviation(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.z.iter().map(|&p| point_segment_distance(p, a, b)).fold(0.0, f64::max)
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist2(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaStatus {
    Converged,
    MaxIterations,
    Infeasible,
    SolverFailure,
}

impl ScaStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScaStatus::Converged => "converged",
            ScaStatus::MaxIterations => "max_iter",
            ScaStatus::Infeasible => "infeasible",
            ScaStatus::SolverFailure => "solver_failure",
        }
    }
}

/// Slack variables and loop bookkeeping. Indices are `[k][n]` for the
/// per-UE slacks and `[n]` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaState {
    /// Squared UAV–UE distance slacks (m²).
    pub lambda_direct: Vec<Vec<f64>>,
    /// Squared UAV–RIS distance slacks (m²), one row per UE.
    pub lambda_ris: Vec<Vec<f64>>,
    /// Squared UAV–BS distance slacks (m²).
    pub mu: Vec<f64>,
    /// Speed slacks (m/s), one per flight slot.
    pub pi: Vec<f64>,
    pub iteration: usize,
    pub p_total_history: Vec<f64>,
    pub status: ScaStatus,
}

impl ScaState {
    /// Slacks equal to the actual squared distances and speeds of `t`.
    pub fn tight(s: &ScenarioConfig, t: &Trajectory) -> Self {
        let uav: Vec<[f64; 3]> = t.z.iter().map(|&p| s.uav_point(p)).collect();
        let sq = |a: [f64; 3], b: [f64; 3]| dist3(a, b).powi(2);
        let lambda_direct = (0..s.num_ues())
            .map(|k| uav.iter().map(|&u| sq(u, s.ue_point(k))).collect())
            .collect();
        let ris_row: Vec<f64> = uav.iter().map(|&u| sq(u, s.ris_point())).collect();
        Self {
            lambda_direct,
            lambda_ris: vec![ris_row; s.num_ues()],
            mu: uav.iter().map(|&u| sq(u, s.bs_point())).collect(),
            pi: t.speeds().iter().map(|v| v.max(s.pi_min)).collect(),
            iteration: 0,
            p_total_history: Vec::new(),
            status: ScaStatus::MaxIterations,
        }
    }
}

/// Constant-velocity straight path between the endpoints with tight slacks.
pub fn init_straight_trajectory(s: &ScenarioConfig, e: &EnergyParams) -> Result<(Trajectory, ScaState)> {
    if s.uav_start == s.uav_end {
        return Err(Error::StraightLineSpeed { speed: 0.0, min: s.pi_min, max: s.v_max });
    }
    straight_line_min_energy(s, e)?;
    let n = s.n_steps as f64;
    let v = [
        (s.uav_end[0] - s.uav_start[0]) / (n * s.tau),
        (s.uav_end[1] - s.uav_start[1]) / (n * s.tau),
    ];
    let mut t = Trajectory::from_velocities(s.uav_start, vec![v; s.n_steps], s.tau);
    *t.z.last_mut().expect("n_steps >= 1") = s.uav_end;
    let state = ScaState::tight(s, &t);
    Ok((t, state))
}
