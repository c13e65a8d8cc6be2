//! Alternating trajectory / power loop.

use crate::energy::straight_line_min_energy;
use crate::error::Result;
use crate::geometry::RisPhaseProfile;
use crate::link::{PowerSchedule, SlotPowers};
use crate::scenario::{EnergyParams, ScenarioConfig, SimControls};

use super::check::{check_constraints, ConstraintReport};
use super::power::{solve_power_subproblem, PowerStep};
use super::trajectory::{solve_trajectory_subproblem, TrajectoryStep};
use super::{init_straight_trajectory, ScaState, ScaStatus, Trajectory};

/// One line of the per-iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub p_total: f64,
    /// Largest exact-constraint violation of the iterate.
    pub max_violation: f64,
    /// Trust radius of the accepted step (m).
    pub trust_radius: f64,
}

#[derive(Debug, Clone)]
pub struct JointResult {
    pub trajectory: Trajectory,
    pub powers: PowerSchedule,
    pub phases: RisPhaseProfile,
    pub state: ScaState,
    pub trace: Vec<TraceRecord>,
    /// Accepted trajectories, straight line first.
    pub iterates: Vec<Trajectory>,
    pub min_energy: f64,
    pub energy_budget: f64,
    pub report: ConstraintReport,
    /// Why the loop stopped when it did not converge cleanly.
    pub message: Option<String>,
    /// Non-fatal events such as repaired inexact trajectory solves.
    pub warnings: Vec<String>,
}

impl JointResult {
    pub fn status(&self) -> ScaStatus {
        self.state.status
    }

    pub fn p_total(&self) -> f64 {
        self.powers.total()
    }
}

struct Run<'a> {
    s: &'a ScenarioConfig,
    e: &'a EnergyParams,
    min_energy: f64,
    energy_budget: f64,
    s_tol: f64,
}

impl Run<'_> {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        trajectory: Trajectory,
        powers: PowerSchedule,
        phases: RisPhaseProfile,
        mut state: ScaState,
        trace: Vec<TraceRecord>,
        iterates: Vec<Trajectory>,
        status: ScaStatus,
        message: Option<String>,
        mut warnings: Vec<String>,
    ) -> JointResult {
        state.status = status;
        let report = check_constraints(self.s, self.e, &trajectory, &powers, self.energy_budget);
        if status != ScaStatus::Infeasible {
            for f in report.violated(self.s_tol) {
                warnings.push(format!("exact constraint `{f}` violated beyond solver_tol on the returned solution"));
            }
        }
        JointResult {
            trajectory,
            powers,
            phases,
            state,
            trace,
            iterates,
            min_energy: self.min_energy,
            energy_budget: self.energy_budget,
            report,
            message,
            warnings,
        }
    }
}

/// Initial powers: the optimum on `traj` with every rate floor raised to at
/// least `initial_power_rate`, falling back to the floors themselves.
fn initial_powers(
    s: &ScenarioConfig,
    traj: &Trajectory,
    phases: &RisPhaseProfile,
    controls: &SimControls,
) -> Result<PowerStep> {
    let zero = PowerSchedule { slots: vec![SlotPowers::zeros(s.num_ues()); traj.z.len()] };
    let mut raised = s.clone();
    raised.r_min = s.r_min.iter().map(|r| r.max(controls.initial_power_rate)).collect();
    if raised.r_min != s.r_min {
        if let step @ PowerStep::Solved { .. } = solve_power_subproblem(&raised, traj, phases, &zero, controls)? {
            return Ok(step);
        }
    }
    solve_power_subproblem(s, traj, phases, &zero, controls)
}

/// Runs the alternating optimization from the straight-line path until the
/// relative decrease of total power drops to `convergence_tol` or the
/// iteration cap is reached.
pub fn run_joint_optimization(
    s: &ScenarioConfig,
    e: &EnergyParams,
    controls: &SimControls,
) -> Result<JointResult> {
    s.validate()?;
    e.validate()?;
    controls.validate()?;
    let (mut traj, mut state) = init_straight_trajectory(s, e)?;
    let min_energy = straight_line_min_energy(s, e)?;
    let run = Run {
        s,
        e,
        min_energy,
        energy_budget: s.energy_budget_multiplier * min_energy,
        s_tol: controls.solver_tol,
    };
    let mut phases = RisPhaseProfile::optimal_along(s, &traj.z);
    let mut iterates = vec![traj.clone()];

    let mut powers = match initial_powers(s, &traj, &phases, controls)? {
        PowerStep::Solved { powers, .. } => powers,
        PowerStep::Infeasible { families, detail } => {
            let zero = PowerSchedule { slots: vec![SlotPowers::zeros(s.num_ues()); traj.z.len()] };
            let msg = format!("infeasible on the initial path ({}): {detail}", families.join(", "));
            return Ok(run.finish(traj, zero, phases, state, vec![], iterates, ScaStatus::Infeasible, Some(msg), vec![]));
        }
        PowerStep::Failed(msg) => {
            let zero = PowerSchedule { slots: vec![SlotPowers::zeros(s.num_ues()); traj.z.len()] };
            return Ok(run.finish(traj, zero, phases, state, vec![], iterates, ScaStatus::SolverFailure, Some(msg), vec![]));
        }
    };

    let mut p_prev = powers.total();
    state.p_total_history.push(p_prev);
    let mut trace = vec![TraceRecord {
        iteration: 0,
        p_total: p_prev,
        max_violation: check_constraints(s, e, &traj, &powers, run.energy_budget).max_violation(),
        trust_radius: controls.trust_radius,
    }];
    let mut status = ScaStatus::MaxIterations;
    let mut message = None;
    let mut warnings = Vec::new();

    'outer: for j in 1..=controls.max_iterations {
        state.iteration = j;
        let mut radius = controls.trust_radius;
        let mut accepted = None;
        for _ in 0..=controls.trust_retries {
            let step = solve_trajectory_subproblem(s, e, controls, &state, &traj, &powers, run.energy_budget, radius)?;
            match step {
                TrajectoryStep::Solved { trajectory, state: next, exact, blend, .. } => {
                    let ph = RisPhaseProfile::optimal_along(s, &trajectory.z);
                    if let PowerStep::Solved { powers: pw, .. } =
                        solve_power_subproblem(s, &trajectory, &ph, &powers, controls)?
                    {
                        if pw.total() <= p_prev * (1.0 + controls.solver_tol) {
                            if !exact {
                                warnings.push(format!(
                                    "iteration {j}: inexact trajectory solve repaired (blend {blend:.3e}) and accepted"
                                ));
                            }
                            accepted = Some((trajectory, next, ph, pw));
                            break;
                        }
                    }
                }
                TrajectoryStep::Infeasible { families, detail } => {
                    // the previous iterate is feasible, so this is a solver fault
                    status = ScaStatus::SolverFailure;
                    message = Some(format!(
                        "iteration {j}: trajectory step reported infeasible ({}) despite a feasible previous iterate: {detail}",
                        families.join(", ")
                    ));
                    break 'outer;
                }
                TrajectoryStep::Failed(msg) => {
                    status = ScaStatus::SolverFailure;
                    message = Some(format!("iteration {j}: {msg}"));
                    break 'outer;
                }
            }
            radius *= 0.5;
        }
        let Some((t_new, st_new, ph_new, pw_new)) = accepted else {
            status = ScaStatus::Converged;
            message = Some(format!("iteration {j}: no power decrease within the trust region, stopping"));
            break;
        };
        let p_new = pw_new.total();
        let history = std::mem::take(&mut state.p_total_history);
        state = st_new;
        state.iteration = j;
        state.p_total_history = history;
        state.p_total_history.push(p_new);
        traj = t_new;
        phases = ph_new;
        powers = pw_new;
        iterates.push(traj.clone());
        trace.push(TraceRecord {
            iteration: j,
            p_total: p_new,
            max_violation: check_constraints(s, e, &traj, &powers, run.energy_budget).max_violation(),
            trust_radius: radius,
        });
        let done = (p_prev - p_new) / p_new <= controls.convergence_tol;
        p_prev = p_new;
        if done {
            status = ScaStatus::Converged;
            break;
        }
    }
    Ok(run.finish(traj, powers, phases, state, trace, iterates, status, message, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_scenario;

    #[test]
    fn unreachable_rate_is_infeasible_at_start() {
        let (mut s, e) = baseline_scenario();
        s.set_uniform_rate(60.0);
        let r = run_joint_optimization(&s, &e, &SimControls::default()).unwrap();
        assert_eq!(r.status(), ScaStatus::Infeasible);
        assert_eq!(r.p_total(), 0.0);
        assert!(r.trajectory.max_deviation(s.uav_start, s.uav_end) < 1e-9);
        assert!(r.message.as_deref().unwrap_or("").contains("infeasible"));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (s, e) = baseline_scenario();
        let c = SimControls { max_iterations: 1, ..SimControls::default() };
        let r = run_joint_optimization(&s, &e, &c).unwrap();
        assert_eq!(r.status(), ScaStatus::MaxIterations);
        assert_eq!(r.state.p_total_history.len(), 2);
        assert_eq!(r.iterates.len(), 2);
        assert!(r.state.p_total_history[1] <= r.state.p_total_history[0]);
    }

    #[test]
    fn trace_matches_history() {
        let (s, e) = baseline_scenario();
        let r = run_joint_optimization(&s, &e, &SimControls::default()).unwrap();
        let traced: Vec<f64> = r.trace.iter().map(|t| t.p_total).collect();
        assert_eq!(traced, r.state.p_total_history);
        assert_eq!(r.trace.last().unwrap().p_total, r.p_total());
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }
}
