//! Exact (non-linearized) constraint evaluation of a returned solution.

use crate::energy::propulsion_power;
use crate::link::{kappa_coefficients, rates, PowerSchedule};
use crate::scenario::{dist2, EnergyParams, ScenarioConfig};

use super::Trajectory;

/// Largest relative violation per constraint family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub families: Vec<(&'static str, f64)>,
}

impl ConstraintReport {
    pub fn max_violation(&self) -> f64 {
        self.families.iter().map(|f| f.1).fold(0.0, f64::max)
    }

    pub fn violation(&self, family: &str) -> Option<f64> {
        self.families.iter().find(|f| f.0 == family).map(|f| f.1)
    }

    pub fn worst(&self) -> Option<(&'static str, f64)> {
        self.families.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Families whose violation exceeds `tol`.
    pub fn violated(&self, tol: f64) -> Vec<&'static str> {
        self.families.iter().filter(|f| !(f.1 <= tol)).map(|f| f.0).collect()
    }
}

fn rel(excess: f64, scale: f64) -> f64 {
    if excess.is_nan() {
        return f64::INFINITY;
    }
    excess.max(0.0) / scale.abs().max(1e-300)
}

/// Re-evaluates rate, backhaul, energy, kinematic and power constraints
/// with the exact channel and propulsion models.
pub fn check_constraints(
    s: &ScenarioConfig,
    e: &EnergyParams,
    t: &Trajectory,
    p: &PowerSchedule,
    energy_budget: f64,
) -> ConstraintReport {
    let mut rate = 0.0f64;
    let mut backhaul = 0.0f64;
    let mut cap = 0.0f64;
    let mut sign = 0.0f64;
    for (n, slot) in p.slots.iter().enumerate() {
        let r = rates(&kappa_coefficients(s, t.z[n]).snr(slot));
        for (k, &need) in s.r_min.iter().enumerate() {
            rate = rate.max(rel(need - r.total[k], 1.0 + need));
        }
        backhaul = backhaul.max(rel(r.aggregate() - r.capacity, 1.0 + r.capacity));
        cap = cap
            .max(rel(slot.bs - s.max_bs_power_w, s.max_bs_power_w))
            .max(rel(slot.uav_total() - s.max_uav_power_w, s.max_uav_power_w));
        let min = slot.direct.iter().chain(&slot.ris).fold(slot.bs, |a, &b| a.min(b));
        sign = sign.max(rel(-min, 1.0));
    }

    let mut families = vec![("rate", rate), ("backhaul", backhaul)];
    families.extend(kinematic_violations(s, e, t, energy_budget));
    families.extend([("power_cap", cap), ("power_sign", sign)]);
    ConstraintReport { families }
}

/// Energy, dynamics, speed, acceleration, endpoint and hover-guard
/// violations of a path.
pub(crate) fn kinematic_violations(
    s: &ScenarioConfig,
    e: &EnergyParams,
    t: &Trajectory,
    energy_budget: f64,
) -> [(&'static str, f64); 7] {
    let mut energy = 0.0;
    let mut min_speed = 0.0f64;
    let mut speed = 0.0f64;
    for v in &t.v {
        let sp = v[0].hypot(v[1]);
        min_speed = min_speed.max(rel(s.pi_min - sp, s.pi_min));
        speed = speed.max(rel(sp - s.v_max, s.v_max));
        energy += propulsion_power(sp.max(s.pi_min), s.pi_min, e).unwrap_or(f64::INFINITY) * t.tau;
    }
    let accel = t
        .v
        .windows(2)
        .map(|w| rel(dist2(w[0], w[1]) - s.v_acc * t.tau, s.v_acc * t.tau))
        .fold(0.0, f64::max);
    let dynamics = t
        .v
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let next = [t.z[n][0] + v[0] * t.tau, t.z[n][1] + v[1] * t.tau];
            let scale = 1.0 + t.z[n + 1][0].abs().max(t.z[n + 1][1].abs());
            rel(dist2(next, t.z[n + 1]), scale)
        })
        .fold(0.0, f64::max);
    let anchor = |a: [f64; 2], b: [f64; 2]| rel(dist2(a, b), 1.0 + b[0].abs().max(b[1].abs()));

    [
        ("energy", rel(energy - energy_budget, energy_budget)),
        ("dynamics", dynamics),
        ("speed", speed),
        ("acceleration", accel),
        ("start", anchor(t.z[0], s.uav_start)),
        ("end", anchor(*t.z.last().expect("non-empty"), s.uav_end)),
        ("min_speed", min_speed),
    ]
}
