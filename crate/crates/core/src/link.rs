//! SNRs, Shannon rates, SNR-per-watt coefficients and the slack-based SNR
//! surrogates used by the trajectory subproblem.

use crate::error::{Error, Result};
use crate::geometry::{
    build_channels, cascade_channel, link_distances, mrt_effective_gains, ris_phase_matrix,
    EffectiveGains, RisPhaseProfile,
};
use crate::scenario::ScenarioConfig;

/// Transmit powers of one slot (watts).
#[derive(Debug, Clone, PartialEq)]
pub struct SlotPowers {
    pub bs: f64,
    /// UAV power on the direct link to each UE.
    pub direct: Vec<f64>,
    /// UAV power on the RIS-assisted link to each UE.
    pub ris: Vec<f64>,
}

impl SlotPowers {
    pub fn zeros(k: usize) -> Self {
        Self {
            bs: 0.0,
            direct: vec![0.0; k],
            ris: vec![0.0; k],
        }
    }

    pub fn uav_total(&self) -> f64 {
        self.direct.iter().sum::<f64>() + self.ris.iter().sum::<f64>()
    }

    pub fn total(&self) -> f64 {
        self.bs + self.uav_total()
    }

    /// Same powers with every entry multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            bs: self.bs * f,
            direct: self.direct.iter().map(|p| p * f).collect(),
            ris: self.ris.iter().map(|p| p * f).collect(),
        }
    }
}

/// Powers for every waypoint of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSchedule {
    pub slots: Vec<SlotPowers>,
}

impl PowerSchedule {
    /// Total transmit power summed over slots, UEs and links.
    pub fn total(&self) -> f64 {
        self.slots.iter().map(SlotPowers::total).sum()
    }

    pub fn mean_direct(&self) -> f64 {
        self.mean_of(|s| s.direct.iter().sum())
    }

    pub fn mean_ris(&self) -> f64 {
        self.mean_of(|s| s.ris.iter().sum())
    }

    /// Mean per-slot, per-UE power of a link family.
    fn mean_of(&self, f: impl Fn(&SlotPowers) -> f64) -> f64 {
        let k = self.slots.first().map_or(1, |s| s.direct.len().max(1));
        self.slots.iter().map(f).sum::<f64>() / (self.slots.len().max(1) * k) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrSet {
    pub bs: f64,
    pub direct: Vec<f64>,
    pub ris: Vec<f64>,
}

/// γ = gain² · P / σ² for every link of one slot.
pub fn snr_set(gains: &EffectiveGains, powers: &SlotPowers, noise_power: f64) -> SnrSet {
    SnrSet {
        bs: gains.bu.powi(2) * powers.bs / noise_power,
        direct: gains
            .ug
            .iter()
            .zip(&powers.direct)
            .map(|(g, p)| g * g * p / noise_power)
            .collect(),
        ris: gains
            .urg
            .iter()
            .zip(&powers.ris)
            .map(|(g, p)| g * g * p / noise_power)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    /// Backhaul capacity BS→UAV.
    pub capacity: f64,
    pub direct: Vec<f64>,
    pub ris: Vec<f64>,
    /// Per-UE sum over both links.
    pub total: Vec<f64>,
}

impl Rates {
    pub fn aggregate(&self) -> f64 {
        self.total.iter().sum()
    }
}

pub fn shannon(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

pub fn rates(snr: &SnrSet) -> Rates {
    let direct: Vec<f64> = snr.direct.iter().map(|&g| shannon(g)).collect();
    let ris: Vec<f64> = snr.ris.iter().map(|&g| shannon(g)).collect();
    let total = direct.iter().zip(&ris).map(|(a, b)| a + b).collect();
    Rates {
        capacity: shannon(snr.bs),
        direct,
        ris,
        total,
    }
}

/// SNR per watt of every link at one UAV position: γ = P · κ.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCoefficients {
    pub bs: f64,
    pub direct: Vec<f64>,
    pub ris: Vec<f64>,
}

impl LinkCoefficients {
    pub fn from_gains(g: &EffectiveGains, noise_power: f64) -> Self {
        Self {
            bs: g.bu.powi(2) / noise_power,
            direct: g.ug.iter().map(|x| x * x / noise_power).collect(),
            ris: g.urg.iter().map(|x| x * x / noise_power).collect(),
        }
    }

    pub fn snr(&self, p: &SlotPowers) -> SnrSet {
        SnrSet {
            bs: p.bs * self.bs,
            direct: p.direct.iter().zip(&self.direct).map(|(a, b)| a * b).collect(),
            ris: p.ris.iter().zip(&self.ris).map(|(a, b)| a * b).collect(),
        }
    }
}

pub fn kappa_coefficients(s: &ScenarioConfig, uav_xy: [f64; 2]) -> LinkCoefficients {
    let d = link_distances(s, uav_xy);
    LinkCoefficients::from_gains(&mrt_effective_gains(&d, s), s.noise_power())
}

/// Coefficients at waypoint `n` with the RIS set to `phases` instead of the
/// co-phasing optimum. The cascade is beamformed by MRT on its own direction.
pub fn kappa_with_phases(
    s: &ScenarioConfig,
    uav_xy: [f64; 2],
    phases: &RisPhaseProfile,
    n: usize,
) -> Result<LinkCoefficients> {
    if n >= phases.waypoints() || phases.elements() != s.ris_array.elements() {
        return Err(Error::Dimension(format!(
            "phase profile has {} waypoints x {} elements, need waypoint {n} of a {}-element RIS",
            phases.waypoints(),
            phases.elements(),
            s.ris_array.elements()
        )));
    }
    let d = link_distances(s, uav_xy);
    let mut g = mrt_effective_gains(&d, s);
    let ch = build_channels(s, uav_xy);
    for k in 0..s.num_ues() {
        let row = cascade_channel(&ch, &ris_phase_matrix(phases, k, n), k)?;
        g.urg[k] = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    Ok(LinkCoefficients::from_gains(&g, s.noise_power()))
}

/// Position-free SNR numerators γ̂: SNR times the squared distance that the
/// matching slack (λ or μ) stands in for.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrNumerators {
    pub bs: f64,
    pub direct: Vec<f64>,
    pub ris: Vec<f64>,
}

pub fn snr_numerators(s: &ScenarioConfig, p: &SlotPowers) -> SnrNumerators {
    let a0 = s.alpha0();
    let noise = s.noise_power();
    let m_b = s.bs_array.elements() as f64;
    let m_u = s.uav_array.elements() as f64;
    let m_r = s.ris_array.elements() as f64;
    let cascade_ref = if s.cascade_two_hop_pathloss { a0 * a0 } else { a0 };
    let ris = s.ris_point();
    SnrNumerators {
        bs: p.bs * m_b * a0 * a0 / noise,
        direct: p.direct.iter().map(|q| q * m_u * a0 * a0 / noise).collect(),
        ris: p
            .ris
            .iter()
            .enumerate()
            .map(|(k, q)| {
                let d_rg = crate::geometry::dist3(ris, s.ue_point(k));
                q * m_u * m_r * m_r * cascade_ref * cascade_ref / (d_rg * d_rg * noise)
            })
            .collect(),
    }
}

/// Slack surrogates γ = γ̂ / λ (UE links) and γ = γ̂ / μ (backhaul).
pub fn slack_snr(
    num: &SnrNumerators,
    lambda_direct: &[f64],
    lambda_ris: &[f64],
    mu: f64,
) -> Result<SnrSet> {
    let check = |name: &'static str, v: f64| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonPositiveSlack { name, value: v })
        }
    };
    let mu = check("mu", mu)?;
    let direct = num
        .direct
        .iter()
        .zip(lambda_direct)
        .map(|(g, &l)| check("lambda_direct", l).map(|l| g / l))
        .collect::<Result<Vec<_>>>()?;
    let ris = num
        .ris
        .iter()
        .zip(lambda_ris)
        .map(|(g, &l)| check("lambda_ris", l).map(|l| g / l))
        .collect::<Result<Vec<_>>>()?;
    Ok(SnrSet {
        bs: num.bs / mu,
        direct,
        ris,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LinkDistances;
    use crate::scenario::baseline_scenario;

    fn gains(bu: f64) -> EffectiveGains {
        EffectiveGains { bu, ug: vec![bu], urg: vec![bu] }
    }

    #[test]
    fn zero_power_zero_snr_and_unit_snr() {
        let p = SlotPowers::zeros(1);
        let g = snr_set(&gains(2.0), &p, 1.0);
        assert_eq!((g.bs, g.direct[0], g.ris[0]), (0.0, 0.0, 0.0));
        let p = SlotPowers { bs: 1.0, direct: vec![1.0], ris: vec![1.0] };
        let g = snr_set(&gains(0.5), &p, 0.25);
        assert_eq!(g.bs, 1.0);
    }

    #[test]
    fn backhaul_snr_reference_value() {
        // P = 1 W, M_B = 16, α0² = 10^-6.1, d = 100 m, σ² = 10^-20.4 W
        let (s, _) = baseline_scenario();
        let d = LinkDistances { bu: 100.0, ug: vec![1.0; 3], ur: 1.0, rg: vec![1.0; 3] };
        let g = mrt_effective_gains(&d, &s);
        let p = SlotPowers { bs: 1.0, ..SlotPowers::zeros(3) };
        let snr = snr_set(&g, &p, s.noise_power());
        let expected = 16.0 * 10f64.powf(-6.1) / (1e4 * 10f64.powf(-20.4));
        assert!((snr.bs / expected - 1.0).abs() < 1e-12);
        assert!((snr.bs / 3.19e11 - 1.0).abs() < 2e-3);
    }

    #[test]
    fn rate_identities() {
        let r = rates(&SnrSet { bs: 0.0, direct: vec![3.0], ris: vec![1.0] });
        assert_eq!(r.capacity, 0.0);
        assert!((r.direct[0] - 2.0).abs() < 1e-15);
        assert!((r.ris[0] - 1.0).abs() < 1e-15);
        assert!((r.total[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_ratio_and_inverse_square() {
        let (s, _) = baseline_scenario();
        let z = [140.0, 260.0];
        let c = kappa_coefficients(&s, z);
        let d = link_distances(&s, z);
        for k in 0..3 {
            let ratio = 1e4 * d.ug[k].powi(2) / (d.rg[k].powi(2) * d.ur.powi(2));
            assert!((c.ris[k] / c.direct[k] / ratio - 1.0).abs() < 1e-12);
        }
        let g1 = mrt_effective_gains(&d, &s);
        let mut d2 = d.clone();
        d2.ug[0] *= 2.0;
        let g2 = mrt_effective_gains(&d2, &s);
        let k1 = LinkCoefficients::from_gains(&g1, s.noise_power()).direct[0];
        let k2 = LinkCoefficients::from_gains(&g2, s.noise_power()).direct[0];
        assert!((k1 / k2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn tight_slacks_reproduce_true_snr() {
        let (s, _) = baseline_scenario();
        let z = [310.0, 90.0];
        let p = SlotPowers { bs: 2e-12, direct: vec![1e-13, 3e-13, 5e-14], ris: vec![4e-13, 0.0, 1e-12] };
        let truth = kappa_coefficients(&s, z).snr(&p);
        let d = link_distances(&s, z);
        let num = snr_numerators(&s, &p);
        let sq: Vec<f64> = d.ug.iter().map(|x| x * x).collect();
        let sur = slack_snr(&num, &sq, &[d.ur * d.ur; 3], d.bu * d.bu).unwrap();
        assert!((sur.bs / truth.bs - 1.0).abs() < 1e-12);
        for k in 0..3 {
            assert!((sur.direct[k] / truth.direct[k] - 1.0).abs() < 1e-12);
            if truth.ris[k] > 0.0 {
                assert!((sur.ris[k] / truth.ris[k] - 1.0).abs() < 1e-12);
            }
        }
        let doubled: Vec<f64> = sq.iter().map(|x| 2.0 * x).collect();
        let half = slack_snr(&num, &doubled, &[d.ur * d.ur; 3], d.bu * d.bu).unwrap();
        assert!((half.direct[1] * 2.0 / sur.direct[1] - 1.0).abs() < 1e-12);
        let loose: Vec<f64> = sq.iter().map(|x| x * 1.001).collect();
        let under = slack_snr(&num, &loose, &[d.ur * d.ur; 3], d.bu * d.bu).unwrap();
        assert!(under.direct.iter().zip(&truth.direct).all(|(a, b)| a <= b));
    }

    #[test]
    fn optimal_phases_reproduce_closed_form() {
        let (s, _) = baseline_scenario();
        let path = [[60.0, 40.0], [260.0, 330.0]];
        let phases = RisPhaseProfile::optimal_along(&s, &path);
        for (n, &z) in path.iter().enumerate() {
            let a = kappa_with_phases(&s, z, &phases, n).unwrap();
            let b = kappa_coefficients(&s, z);
            for k in 0..3 {
                assert!((a.ris[k] / b.ris[k] - 1.0).abs() < 1e-9);
            }
        }
        let zero = RisPhaseProfile::zeros(100, 3, 2);
        let c = kappa_with_phases(&s, path[0], &zero, 0).unwrap();
        assert!(c.ris[0] < kappa_coefficients(&s, path[0]).ris[0]);
        assert!(kappa_with_phases(&s, path[0], &zero, 2).is_err());
    }

    #[test]
    fn non_positive_slack_is_rejected() {
        let num = SnrNumerators { bs: 1.0, direct: vec![1.0], ris: vec![1.0] };
        assert!(matches!(
            slack_snr(&num, &[0.0], &[1.0], 1.0),
            Err(Error::NonPositiveSlack { name: "lambda_direct", .. })
        ));
        assert!(slack_snr(&num, &[1.0], &[1.0], -1.0).is_err());
    }
}
