//! Rotary-wing propulsion power and trajectory energy.

use crate::error::{Error, Result};
use crate::scenario::{dist2, EnergyParams, ScenarioConfig};

impl EnergyParams {
    /// Coefficient of ‖v‖² in the blade-profile term.
    pub fn blade_quadratic(&self) -> f64 {
        3.0 * self.blade_power / (self.omega * self.rotor_radius).powi(2)
    }

    /// Coefficient of ‖v‖³ in the parasite term.
    pub fn parasite_cubic(&self) -> f64 {
        0.5 * self.fuselage_drag * self.air_density * self.rotor_solidity * self.rotor_disc_area
    }

    /// Numerator of the induced term `P_i v_0 / v`.
    pub fn induced_numerator(&self) -> f64 {
        self.induced_power * self.induced_velocity
    }
}

fn power_terms(speed: f64, induced_divisor: f64, p: &EnergyParams) -> f64 {
    p.blade_power + p.blade_quadratic() * speed * speed
        + p.induced_numerator() / induced_divisor
        + p.parasite_cubic() * speed.powi(3)
}

/// Propulsion power (W) at `speed` m/s. Speeds below `floor` are rejected
/// since the induced term diverges at hover.
pub fn propulsion_power(speed: f64, floor: f64, p: &EnergyParams) -> Result<f64> {
    if !(speed >= floor) {
        return Err(Error::SpeedBelowFloor { speed, floor });
    }
    Ok(power_terms(speed, speed, p))
}

/// Propulsion power with the induced term divided by the speed slack π
/// instead of the speed itself. Conservative whenever π ≤ speed.
pub fn propulsion_power_slack(speed: f64, pi_slack: f64, floor: f64, p: &EnergyParams) -> Result<f64> {
    if !(pi_slack >= floor) {
        return Err(Error::SpeedBelowFloor { speed: pi_slack, floor });
    }
    Ok(power_terms(speed, pi_slack, p))
}

/// Energy (J) of a velocity sequence flown for `tau` seconds per slot.
pub fn velocity_energy(velocities: &[[f64; 2]], tau: f64, floor: f64, p: &EnergyParams) -> Result<f64> {
    velocities.iter().try_fold(0.0, |acc, v| {
        Ok(acc + propulsion_power(v[0].hypot(v[1]), floor, p)? * tau)
    })
}

/// Constant speed of the straight path between the scenario endpoints.
pub fn straight_line_speed(s: &ScenarioConfig) -> f64 {
    dist2(s.uav_start, s.uav_end) / (s.n_steps as f64 * s.tau)
}

/// Energy of the constant-velocity straight path (E_min).
pub fn straight_line_min_energy(s: &ScenarioConfig, p: &EnergyParams) -> Result<f64> {
    let speed = straight_line_speed(s);
    if !(speed >= s.pi_min && speed <= s.v_max) {
        return Err(Error::StraightLineSpeed {
            speed,
            min: s.pi_min,
            max: s.v_max,
        });
    }
    Ok(propulsion_power(speed, s.pi_min, p)? * s.tau * s.n_steps as f64)
}

/// Energy budget E_max = multiplier · E_min.
pub fn energy_budget(s: &ScenarioConfig, p: &EnergyParams) -> Result<f64> {
    Ok(s.energy_budget_multiplier * straight_line_min_energy(s, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_scenario;

    /// Term-by-term evaluation written out from the model constants.
    fn oracle(v: f64) -> f64 {
        let blade = 79.86 * (1.0 + 3.0 * v * v / (300.0f64 * 300.0 * 0.4 * 0.4));
        let induced = 88.63 * 4.03 / v;
        let parasite = 0.5 * 0.3 * 1.225 * 0.05 * 0.503 * v * v * v;
        blade + induced + parasite
    }

    #[test]
    fn reference_speeds() {
        let p = EnergyParams::default();
        let p10 = propulsion_power(10.0, 0.1, &p).unwrap();
        let p20 = propulsion_power(20.0, 0.1, &p).unwrap();
        assert!((p10 - oracle(10.0)).abs() < 1e-9);
        assert!((p20 - oracle(20.0)).abs() < 1e-9);
        assert!((p10 - 121.86).abs() < 0.01);
        assert!((p20 - 141.35).abs() < 0.01);
    }

    #[test]
    fn parasite_term_is_cubic() {
        let p = EnergyParams::default();
        let parasite = |v: f64| p.parasite_cubic() * v.powi(3);
        assert_eq!(parasite(14.0), 8.0 * parasite(7.0));
    }

    #[test]
    fn slack_variants() {
        let p = EnergyParams::default();
        let exact = propulsion_power(12.0, 0.1, &p).unwrap();
        assert_eq!(propulsion_power_slack(12.0, 12.0, 0.1, &p).unwrap(), exact);
        assert!(propulsion_power_slack(12.0, 9.0, 0.1, &p).unwrap() > exact);
        assert!(propulsion_power_slack(0.1, 0.1, 0.1, &p).unwrap().is_finite());
        assert!(propulsion_power_slack(5.0, 0.05, 0.1, &p).is_err());
        assert!(matches!(
            propulsion_power(0.01, 0.1, &p),
            Err(Error::SpeedBelowFloor { .. })
        ));
    }

    #[test]
    fn trajectory_energy_additivity_and_tau() {
        let p = EnergyParams::default();
        let one = velocity_energy(&[[6.0, 8.0]], 1.0, 0.1, &p).unwrap();
        let two = velocity_energy(&[[6.0, 8.0], [8.0, 6.0]], 1.0, 0.1, &p).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12);
        let slow = velocity_energy(&[[6.0, 8.0]; 50], 2.0, 0.1, &p).unwrap();
        let fast = velocity_energy(&[[6.0, 8.0]; 50], 1.0, 0.1, &p).unwrap();
        assert!((slow - 2.0 * fast).abs() < 1e-9);
        assert!((fast - 50.0 * oracle(10.0)).abs() < 1e-9);
        assert!((fast - 6093.0).abs() < 1.0);
    }

    #[test]
    fn baseline_minimum_energy() {
        let (s, p) = baseline_scenario();
        let v = straight_line_speed(&s);
        assert!((v - 200f64.sqrt()).abs() < 1e-12);
        let e = straight_line_min_energy(&s, &p).unwrap();
        assert!((e - 50.0 * oracle(v)).abs() < 1e-9);
        assert!((e - 6076.0).abs() < 1.0);
    }

    #[test]
    fn coincident_endpoints_fail_the_floor() {
        let (mut s, p) = baseline_scenario();
        s.uav_end = s.uav_start;
        assert!(matches!(
            straight_line_min_energy(&s, &p),
            Err(Error::StraightLineSpeed { .. })
        ));
    }

    #[test]
    fn midpoint_convex_on_grid() {
        let p = EnergyParams::default();
        let f = |v: f64| propulsion_power(v, 0.1, &p).unwrap();
        let grid: Vec<f64> = (0..300).map(|i| 0.1 + i as f64 * 0.1).collect();
        for (i, &a) in grid.iter().enumerate() {
            for &b in &grid[i + 1..] {
                assert!(f(0.5 * (a + b)) <= 0.5 * (f(a) + f(b)) + 1e-9);
            }
        }
    }
}
