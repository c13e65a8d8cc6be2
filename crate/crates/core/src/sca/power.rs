//! Transmit-power step on a fixed trajectory and RIS configuration.
//!
//! Each waypoint is an independent conic program in the SNR variables
//! `x = κ·p`. Per-UE rates are imposed exactly through exponential cones.
//! The backhaul requirement bounds the aggregate rate from above by its
//! tangents at the previous powers, which is conservative, and the tangents
//! are re-expanded until the total power settles.

use std::f64::consts::LN_2;

use crate::convex::{solve, Affine, Constraint, ConvexProgram, SolveStatus, Var};
use crate::error::Result;
use crate::geometry::RisPhaseProfile;
use crate::link::{kappa_with_phases, LinkCoefficients, PowerSchedule, SlotPowers};
use crate::scenario::{ScenarioConfig, SimControls};

use super::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub enum PowerStep {
    Solved {
        powers: PowerSchedule,
        inner_iterations: usize,
    },
    Infeasible {
        families: Vec<String>,
        detail: String,
    },
    Failed(String),
}

/// Least total power over links with SNR-per-watt `kappa` reaching `rate`
/// bits/s/Hz in sum. Untied: water-filling. Tied: one common power.
pub fn minimum_uav_power(kappa: &[f64], rate: f64, tied: bool) -> Vec<f64> {
    if rate <= 0.0 || kappa.is_empty() {
        return vec![0.0; kappa.len()];
    }
    let kmax = kappa.iter().copied().fold(0.0, f64::max);
    let sum_rate = |level: f64| -> f64 {
        if tied {
            kappa.iter().map(|k| (k * level).ln_1p()).sum::<f64>() / LN_2
        } else {
            kappa.iter().map(|k| (k * level).max(1.0).log2()).sum()
        }
    };
    // Either scheme reaches `rate` once the best link alone does.
    let mut hi = if tied { (rate.exp2() - 1.0) / kmax } else { rate.exp2() / kmax };
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_rate(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if tied {
        vec![hi; kappa.len()]
    } else {
        kappa.iter().map(|k| (hi - 1.0 / k).max(0.0)).collect()
    }
}

/// Scales `x` by a common factor so that `Σ log2(1 + xᵢ) = rate`.
fn scale_to_rate(x: &mut [f64], rate: f64) {
    let r = |a: f64, x: &[f64]| x.iter().map(|v| (a * v).ln_1p()).sum::<f64>() / LN_2;
    if x.iter().all(|&v| v <= 0.0) {
        return;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while r(hi, x) < rate {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r(mid, x) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x.iter_mut().for_each(|v| *v *= hi);
}

struct SlotInput<'a> {
    kappa: &'a LinkCoefficients,
    rates: &'a [f64],
    /// Expansion point in SNR units: direct then RIS per UE.
    x_j: Vec<(f64, f64)>,
    tied: bool,
}

fn slot_program(inp: &SlotInput) -> (ConvexProgram, Vec<(Var, Var)>) {
    let k_n = inp.rates.len();
    let mut prog = ConvexProgram::new();
    let inv: Vec<f64> = inp
        .kappa
        .direct
        .iter()
        .chain(&inp.kappa.ris)
        .chain(std::iter::once(&inp.kappa.bs))
        .map(|k| 1.0 / k)
        .collect();
    let norm = inv.iter().copied().fold(0.0, f64::max);

    let mut links = Vec::with_capacity(k_n);
    let mut objective = Affine::default();
    let mut over = Affine::default();
    for k in 0..k_n {
        let xd = prog.nonneg(format!("x_direct[{k}]"));
        let xr = prog.nonneg(format!("x_ris[{k}]"));
        let td = prog.free(format!("t_direct[{k}]"));
        let tr = prog.free(format!("t_ris[{k}]"));
        prog.constrain("rate", Constraint::LogGe { t: td.into(), x: xd.into() });
        prog.constrain("rate", Constraint::LogGe { t: tr.into(), x: xr.into() });
        prog.le("rate", inp.rates[k] * LN_2, td + tr);
        if inp.tied {
            prog.eq("tie", xd - xr * (inp.kappa.direct[k] / inp.kappa.ris[k]));
        }
        objective = objective + xd * (1.0 / inp.kappa.direct[k] / norm) + xr * (1.0 / inp.kappa.ris[k] / norm);
        for (v, xj) in [(xd, inp.x_j[k].0), (xr, inp.x_j[k].1)] {
            over = over + (v * (1.0 / (1.0 + xj))) + (xj.ln_1p() - xj / (1.0 + xj));
        }
        links.push((xd, xr));
    }
    let xb = prog.nonneg("x_bs");
    let sb = prog.free("s_bs");
    prog.constrain("backhaul", Constraint::LogGe { t: sb.into(), x: xb.into() });
    prog.le("backhaul", over, sb);
    prog.minimize(objective + xb * (1.0 / inp.kappa.bs / norm));
    (prog, links)
}

/// Feasibility screen against the power caps. Exact for this program: the
/// UAV optimum is the per-UE minimum and the BS optimum the least power
/// carrying the aggregate requirement.
fn screen(s: &ScenarioConfig, kappa: &LinkCoefficients, rates: &[f64], n: usize) -> Option<(Vec<String>, String)> {
    let uav: f64 = (0..rates.len())
        .map(|k| {
            minimum_uav_power(&[kappa.direct[k], kappa.ris[k]], rates[k], s.tie_link_powers)
                .iter()
                .sum::<f64>()
        })
        .sum();
    if uav > s.max_uav_power_w {
        return Some((
            vec!["rate".into(), "uav_power_cap".into()],
            format!("waypoint {n}: minimum UAV power {uav:.3e} W exceeds {} W", s.max_uav_power_w),
        ));
    }
    let aggregate: f64 = rates.iter().sum();
    let bs = (aggregate.exp2() - 1.0) / kappa.bs;
    if bs > s.max_bs_power_w {
        return Some((
            vec!["backhaul".into(), "bs_power_cap".into()],
            format!(
                "waypoint {n}: aggregate {aggregate:.3} bits/s/Hz needs {bs:.3e} W at the BS, cap {} W",
                s.max_bs_power_w
            ),
        ));
    }
    None
}

/// Minimizes total transmit power along `traj` subject to the per-UE rate
/// floors of `s.r_min` and the backhaul limit.
pub fn solve_power_subproblem(
    s: &ScenarioConfig,
    traj: &Trajectory,
    phases: &RisPhaseProfile,
    powers_j: &PowerSchedule,
    controls: &SimControls,
) -> Result<PowerStep> {
    let kappas = traj
        .z
        .iter()
        .enumerate()
        .map(|(n, &z)| kappa_with_phases(s, z, phases, n))
        .collect::<Result<Vec<_>>>()?;
    for (n, kappa) in kappas.iter().enumerate() {
        if let Some((families, detail)) = screen(s, kappa, &s.r_min, n) {
            return Ok(PowerStep::Infeasible { families, detail });
        }
    }

    let mut x_j: Vec<Vec<(f64, f64)>> = kappas
        .iter()
        .enumerate()
        .map(|(n, kp)| {
            let slot = powers_j.slots.get(n);
            (0..s.num_ues())
                .map(|k| match slot {
                    Some(p) => (p.direct[k] * kp.direct[k], p.ris[k] * kp.ris[k]),
                    None => (0.0, 0.0),
                })
                .collect()
        })
        .collect();
    let mut previous = powers_j.total();
    let mut schedule = PowerSchedule { slots: Vec::new() };

    for inner in 1..=controls.inner_iterations {
        let mut slots = Vec::with_capacity(kappas.len());
        for (n, kappa) in kappas.iter().enumerate() {
            let input = SlotInput {
                kappa,
                rates: &s.r_min,
                x_j: x_j[n].clone(),
                tied: s.tie_link_powers,
            };
            let (prog, links) = slot_program(&input);
            let res = solve(&prog, controls)?;
            match res.status {
                SolveStatus::Optimal => {}
                SolveStatus::Infeasible => {
                    return Ok(PowerStep::Infeasible {
                        families: res.infeasible_families.clone(),
                        detail: format!("waypoint {n}: {}", res.diagnostics()),
                    })
                }
                SolveStatus::NumericalFailure => {
                    return Ok(PowerStep::Failed(format!("power step, waypoint {n}: {}", res.diagnostics())))
                }
            }
            let mut slot = SlotPowers::zeros(s.num_ues());
            let mut aggregate = 0.0;
            for (k, &(vd, vr)) in links.iter().enumerate() {
                let mut x = [res.value(vd).max(0.0), res.value(vr).max(0.0)];
                if s.r_min[k] > 0.0 && x.iter().all(|&v| v <= 0.0) {
                    let p = minimum_uav_power(&[kappa.direct[k], kappa.ris[k]], s.r_min[k], s.tie_link_powers);
                    x = [p[0] * kappa.direct[k], p[1] * kappa.ris[k]];
                }
                scale_to_rate(&mut x, s.r_min[k]);
                // with every rate met exactly the BS power no longer depends
                // on the split, so the per-UE minimum is the exact optimum
                let exact = minimum_uav_power(&[kappa.direct[k], kappa.ris[k]], s.r_min[k], s.tie_link_powers);
                if exact[0] + exact[1] <= x[0] / kappa.direct[k] + x[1] / kappa.ris[k] {
                    x = [exact[0] * kappa.direct[k], exact[1] * kappa.ris[k]];
                }
                slot.direct[k] = x[0] / kappa.direct[k];
                slot.ris[k] = x[1] / kappa.ris[k];
                aggregate += x.iter().map(|v| v.ln_1p()).sum::<f64>() / LN_2;
                x_j[n][k] = (x[0], x[1]);
            }
            // least BS power carrying the polished aggregate rate
            slot.bs = (aggregate.exp2() - 1.0).max(0.0) / kappa.bs;
            slots.push(slot);
        }
        schedule = PowerSchedule { slots };
        let total = schedule.total();
        if (previous - total).abs() <= controls.convergence_tol * total.max(f64::MIN_POSITIVE) {
            return Ok(PowerStep::Solved { powers: schedule, inner_iterations: inner });
        }
        previous = total;
    }
    Ok(PowerStep::Solved { powers: schedule, inner_iterations: controls.inner_iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_scenario;
    use crate::sca::init_straight_trajectory;

    #[test]
    fn single_link_regime_and_split_regime() {
        let p = minimum_uav_power(&[100.0, 1.0], 1.0, false);
        assert!((p[0] - 0.01).abs() < 1e-12);
        assert_eq!(p[1], 0.0);
        // 2^R > κ1/κ2 → both links active at level √(2^R/(κ1κ2))
        let p = minimum_uav_power(&[2.0, 1.0], 3.0, false);
        let level = (8.0f64 / 2.0).sqrt();
        assert!((p[0] - (level - 0.5)).abs() < 1e-9);
        assert!((p[1] - (level - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn tied_minimum_solves_quadratic() {
        let (k1, k2, r) = (3.0, 1.0, 2.0);
        let p = minimum_uav_power(&[k1, k2], r, true);
        let (a, b, c) = (k1 * k2, k1 + k2, 1.0 - 4.0);
        let root = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!((p[0] - root).abs() < 1e-12 && p[0] == p[1]);
    }

    #[test]
    fn baseline_straight_line_power_step() {
        let (s, e) = baseline_scenario();
        let (t, _) = init_straight_trajectory(&s, &e).unwrap();
        let phases = RisPhaseProfile::optimal_along(&s, &t.z);
        let zero = PowerSchedule { slots: vec![SlotPowers::zeros(3); t.z.len()] };
        let step = solve_power_subproblem(&s, &t, &phases, &zero, &SimControls::default()).unwrap();
        let PowerStep::Solved { powers, .. } = step else { panic!("{step:?}") };
        for (n, slot) in powers.slots.iter().enumerate() {
            let kp = crate::link::kappa_coefficients(&s, t.z[n]);
            let mut best = 0.0;
            for k in 0..3 {
                let opt: f64 = minimum_uav_power(&[kp.direct[k], kp.ris[k]], s.r_min[k], false).iter().sum();
                best += opt;
            }
            let got = slot.uav_total();
            assert!((got - best).abs() <= 1e-4 * best, "slot {n}: {got} vs {best}");
        }
    }
}
