//! Randomized invariants of the surrogates, the propulsion model, the
//! trajectory step and the joint loop.

use proptest::prelude::*;

use uav_ris_sca::energy::{propulsion_power, straight_line_min_energy};
use uav_ris_sca::geometry::RisPhaseProfile;
use uav_ris_sca::sca::{
    capacity_lower_bound, init_straight_trajectory, power_upper_bounds, rate_lower_bound, run_joint_optimization,
    solve_power_subproblem, solve_trajectory_subproblem, velocity_lower_bound, PowerSchedule, PowerStep, ScaState,
    SlotPowers, Trajectory, TrajectoryStep,
};
use uav_ris_sca::scenario::{baseline_scenario, EnergyParams, ScenarioConfig, SimControls};

fn log2_rate(g: f64, l: f64) -> f64 {
    (1.0 + g / l).log2()
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

proptest! {
    #[test]
    fn rate_tangent_under_estimates(g in 1e-3f64..1e9, l in 1.0f64..1e6, lj in 1.0f64..1e6) {
        let lb = rate_lower_bound(g, l, lj).unwrap();
        let exact = log2_rate(g, l);
        prop_assert!(lb <= exact + 1e-12 * exact.abs().max(1.0));
        let at = rate_lower_bound(g, lj, lj).unwrap();
        prop_assert!((at - log2_rate(g, lj)).abs() <= 1e-12 * at.abs().max(1.0));
    }

    #[test]
    fn capacity_tangent_under_estimates(g in 1e-3f64..1e9, m in 1.0f64..1e6, mj in 1.0f64..1e6) {
        let lb = capacity_lower_bound(g, m, mj).unwrap();
        prop_assert!(lb <= log2_rate(g, m) + 1e-12 * log2_rate(g, m).max(1.0));
    }

    #[test]
    fn velocity_tangent_under_estimates(v in prop::array::uniform2(-60.0f64..60.0), vj in prop::array::uniform2(-60.0f64..60.0)) {
        let sq = v[0] * v[0] + v[1] * v[1];
        let lb = velocity_lower_bound(v, vj);
        prop_assert!(lb <= sq + 1e-9);
        let gap = (v[0] - vj[0]).powi(2) + (v[1] - vj[1]).powi(2);
        prop_assert!((sq - lb - gap).abs() <= 1e-8 * sq.max(1.0));
    }

    #[test]
    fn power_tangent_over_estimates(p in 0.0f64..1.0, pj in 0.0f64..1.0, kappa in 1e-3f64..1e6) {
        let ub = power_upper_bounds(p, pj, kappa);
        let exact = (kappa * p).ln_1p() / std::f64::consts::LN_2;
        prop_assert!(ub >= exact - 1e-12 * exact.max(1.0));
    }

    #[test]
    fn propulsion_is_convex_in_speed(a in 3.0f64..60.0, b in 3.0f64..60.0) {
        let e = EnergyParams::default();
        let mid = propulsion_power(0.5 * (a + b), 3.0, &e).unwrap();
        let chord = 0.5 * (propulsion_power(a, 3.0, &e).unwrap() + propulsion_power(b, 3.0, &e).unwrap());
        prop_assert!(mid <= chord * (1.0 + 1e-12));
    }

    #[test]
    fn tight_slacks_match_geometry(
        pts in prop::collection::vec(prop::array::uniform2(0.0f64..500.0), 3..12)
    ) {
        let (s, _) = baseline_scenario();
        let t = Trajectory { z: pts.clone(), v: vec![[0.0; 2]; pts.len() - 1], tau: s.tau };
        let st = ScaState::tight(&s, &t);
        for (n, &p) in pts.iter().enumerate() {
            let u = s.uav_point(p);
            prop_assert!((st.mu[n] - dist(u, s.bs_point()).powi(2)).abs() <= 1e-9 * st.mu[n]);
            for k in 0..s.num_ues() {
                let d = dist(u, s.ue_point(k)).powi(2);
                prop_assert!((st.lambda_direct[k][n] - d).abs() <= 1e-9 * d);
                let r = dist(u, s.ris_point()).powi(2);
                prop_assert!((st.lambda_ris[k][n] - r).abs() <= 1e-9 * r);
            }
        }
        prop_assert!(st.pi.iter().all(|&pi| pi >= s.pi_min));
    }
}

fn stepped(s: &ScenarioConfig, e: &EnergyParams, c: &SimControls, mult: f64, radius: f64) -> (Trajectory, Trajectory, f64) {
    let (t, st) = init_straight_trajectory(s, e).unwrap();
    let phases = RisPhaseProfile::optimal_along(s, &t.z);
    let zero = PowerSchedule { slots: vec![SlotPowers::zeros(s.num_ues()); t.z.len()] };
    let PowerStep::Solved { powers, .. } = solve_power_subproblem(s, &t, &phases, &zero, c).unwrap() else {
        panic!("power step failed")
    };
    let budget = mult * straight_line_min_energy(s, e).unwrap();
    let step = solve_trajectory_subproblem(s, e, c, &st, &t, &powers, budget, radius).unwrap();
    let TrajectoryStep::Solved { trajectory, .. } = step else { panic!("{step:?}") };
    (t, trajectory, budget)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn trajectory_step_obeys_exact_kinematics(
        mult in 1.05f64..2.0,
        radius in 5.0f64..120.0,
        r_min in 0.05f64..0.8,
    ) {
        let (mut s, e) = baseline_scenario();
        s.set_uniform_rate(r_min);
        let c = SimControls::default();
        let tol = 10.0 * c.solver_tol;
        let (prev, t, budget) = stepped(&s, &e, &c, mult, radius);

        prop_assert!(dist(s.uav_point(t.z[0]), s.uav_point(s.uav_start)) <= tol * 500.0);
        let last = *t.z.last().unwrap();
        prop_assert!(dist(s.uav_point(last), s.uav_point(s.uav_end)) <= tol * 500.0);
        let mut energy = 0.0;
        for (n, v) in t.v.iter().enumerate() {
            let next = [t.z[n][0] + v[0] * s.tau, t.z[n][1] + v[1] * s.tau];
            prop_assert!((next[0] - t.z[n + 1][0]).hypot(next[1] - t.z[n + 1][1]) <= tol * 500.0);
            let sp = v[0].hypot(v[1]);
            prop_assert!(sp <= s.v_max * (1.0 + tol));
            prop_assert!(sp >= s.pi_min * (1.0 - tol));
            energy += propulsion_power(sp.max(s.pi_min), s.pi_min, &e).unwrap() * s.tau;
        }
        for w in t.v.windows(2) {
            prop_assert!((w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]) <= s.v_acc * s.tau * (1.0 + tol));
        }
        prop_assert!(energy <= budget * (1.0 + tol));
        for (a, b) in t.z.iter().zip(&prev.z) {
            prop_assert!((a[0] - b[0]).hypot(a[1] - b[1]) <= radius * (1.0 + 1e-6));
        }
    }

    #[test]
    fn noise_scaling_keeps_the_trajectory(exp in -2.0f64..2.0) {
        let (s, e) = baseline_scenario();
        let c = SimControls { max_iterations: 2, ..SimControls::default() };
        let mut scaled = s.clone();
        scaled.noise_dbm += 10.0 * exp;
        let f = 10f64.powf(exp);
        scaled.max_bs_power_w *= f;
        scaled.max_uav_power_w *= f;
        let a = run_joint_optimization(&s, &e, &c).unwrap();
        let b = run_joint_optimization(&scaled, &e, &c).unwrap();
        prop_assert_eq!(a.status(), b.status());
        for (p, q) in a.trajectory.z.iter().zip(&b.trajectory.z) {
            prop_assert!((p[0] - q[0]).hypot(p[1] - q[1]) <= 1e-3, "{:?} vs {:?}", p, q);
        }
        let ratio = b.p_total() / a.p_total();
        prop_assert!((ratio / f - 1.0).abs() <= 1e-4, "ratio {} expected {}", ratio, f);
    }
}
