//! Link angles, UPA steering vectors, line-of-sight channels, the RIS
//! phase matrix and the MRT effective gains.
//!
//! Channel phase conventions: a steering vector carries the progression
//! `exp(-j 2π/λ (m_x Δ_x sinθ cosξ + m_y Δ_y sinθ sinξ))` with the first
//! element fixed to 1. The RIS-to-UE channel uses the conjugate progression,
//! which makes the closed-form phase policy of [`optimal_ris_phase`] the
//! co-phasing solution of the cascade.
//!
//! Amplitudes: every direct channel entry has modulus `α0 / d`. The
//! UAV-RIS matrix is scaled by `1 / d_UR` so the cascade carries a single
//! `α0` (or by `α0 / d_UR` when the two-hop path loss switch is set).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::{ArrayGeometry, ScenarioConfig};

/// Elevation sine and azimuth sine/cosine of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAngle {
    pub sin_theta: f64,
    pub sin_xi: f64,
    pub cos_xi: f64,
}

impl LinkAngle {
    /// Builds the angle triple from a vertical reference and the endpoints'
    /// horizontal coordinates. Directly overhead, ξ falls back to 0.
    fn from_geometry(vertical: f64, distance: f64, a: [f64; 2], b: [f64; 2]) -> Self {
        let sin_theta = (vertical.abs() / distance).clamp(0.0, 1.0);
        let dx = (a[0] - b[0]).abs();
        let dy = (a[1] - b[1]).abs();
        let horizontal = dx.hypot(dy);
        let (sin_xi, cos_xi) = if horizontal > 0.0 {
            (dx / horizontal, dy / horizontal)
        } else {
            (0.0, 1.0)
        };
        Self {
            sin_theta,
            sin_xi,
            cos_xi,
        }
    }

    /// Direction cosines `(sinθ cosξ, sinθ sinξ)` driving the x and y
    /// phase progressions.
    pub fn direction(&self) -> (f64, f64) {
        (self.sin_theta * self.cos_xi, self.sin_theta * self.sin_xi)
    }
}

/// Angles of every link for one UAV position.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkAngles {
    pub bu: LinkAngle,
    pub ug: Vec<LinkAngle>,
    /// Shared by the UAV-to-RIS departure and the RIS arrival.
    pub ur: LinkAngle,
    pub rg: Vec<LinkAngle>,
}

pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn xy(p: [f64; 3]) -> [f64; 2] {
    [p[0], p[1]]
}

/// Node distances for one UAV position (3-D Euclidean).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDistances {
    pub bu: f64,
    pub ug: Vec<f64>,
    pub ur: f64,
    pub rg: Vec<f64>,
}

pub fn link_distances(s: &ScenarioConfig, uav_xy: [f64; 2]) -> LinkDistances {
    let uav = s.uav_point(uav_xy);
    let ris = s.ris_point();
    LinkDistances {
        bu: dist3(s.bs_point(), uav),
        ug: (0..s.num_ues()).map(|k| dist3(s.ue_point(k), uav)).collect(),
        ur: dist3(ris, uav),
        rg: (0..s.num_ues()).map(|k| dist3(ris, s.ue_point(k))).collect(),
    }
}

pub fn link_angles(s: &ScenarioConfig, uav_xy: [f64; 2]) -> LinkAngles {
    let d = link_distances(s, uav_xy);
    let ris = xy(s.ris_point());
    LinkAngles {
        bu: LinkAngle::from_geometry(s.bs_height, d.bu, s.bs_position, uav_xy),
        ug: (0..s.num_ues())
            .map(|k| LinkAngle::from_geometry(s.uav_height, d.ug[k], s.ue_positions[k], uav_xy))
            .collect(),
        ur: LinkAngle::from_geometry(s.uav_height - s.ris_height, d.ur, ris, uav_xy),
        rg: (0..s.num_ues())
            .map(|k| LinkAngle::from_geometry(s.ris_height, d.rg[k], s.ue_positions[k], ris))
            .collect(),
    }
}

/// Per-element phase (radians, before the minus sign) of a UPA, in
/// Kronecker order `index = m_x * ny + m_y`.
fn progression(grid: &ArrayGeometry, lambda_c: f64, angle: &LinkAngle) -> impl Iterator<Item = f64> {
    let (ux, uy) = angle.direction();
    let kx = TAU * grid.dx / lambda_c * ux;
    let ky = TAU * grid.dy / lambda_c * uy;
    let ny = grid.ny;
    (0..grid.nx).flat_map(move |mx| (0..ny).map(move |my| kx * mx as f64 + ky * my as f64))
}

/// Unit-modulus UPA steering vector: Kronecker product of the x and y
/// progressions, first entry 1.
pub fn steering_vector(grid: &ArrayGeometry, lambda_c: f64, angle: &LinkAngle) -> Vec<Complex64> {
    progression(grid, lambda_c, angle)
        .map(|psi| Complex64::from_polar(1.0, -psi))
        .collect()
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// `a · bᴴ` scaled by `scale`.
    pub fn outer(a: &[Complex64], b: &[Complex64], scale: f64) -> Self {
        let data = a
            .iter()
            .flat_map(|&ai| b.iter().map(move |&bj| ai * bj.conj() * scale))
            .collect();
        Self {
            rows: a.len(),
            cols: b.len(),
            data,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let pivot = (rank..rows)
                .max_by(|&a, &b| m[a * cols + c].norm().total_cmp(&m[b * cols + c].norm()))
                .unwrap();
            if m[pivot * cols + c].norm() <= tol * scale {
                continue;
            }
            for j in 0..cols {
                m.swap(rank * cols + j, pivot * cols + j);
            }
            let p = m[rank * cols + c];
            for r in rank + 1..rows {
                let f = m[r * cols + c] / p;
                for j in c..cols {
                    let v = m[rank * cols + j];
                    m[r * cols + j] -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }
}

/// All four line-of-sight channels at one UAV position.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_bu: Vec<Complex64>,
    pub h_ug: Vec<Vec<Complex64>>,
    /// M_R × M_U.
    pub h_ur: ComplexMatrix,
    /// UAV-side steering vector of the UAV-RIS link (unit modulus).
    pub uav_to_ris: Vec<Complex64>,
    pub h_rg: Vec<Vec<Complex64>>,
    pub distances: LinkDistances,
}

/// Amplitude factor applied once to the UAV-RIS matrix.
fn ur_scale(s: &ScenarioConfig, d_ur: f64) -> f64 {
    if s.cascade_two_hop_pathloss {
        s.alpha0() / d_ur
    } else {
        1.0 / d_ur
    }
}

pub fn build_channels(s: &ScenarioConfig, uav_xy: [f64; 2]) -> ChannelSet {
    let angles = link_angles(s, uav_xy);
    let d = link_distances(s, uav_xy);
    let a0 = s.alpha0();
    let lc = s.carrier_wavelength;
    let scaled = |v: Vec<Complex64>, g: f64| v.into_iter().map(|z| z * g).collect::<Vec<_>>();

    let h_bu = scaled(steering_vector(&s.bs_array, lc, &angles.bu), a0 / d.bu);
    let h_ug = (0..s.num_ues())
        .map(|k| scaled(steering_vector(&s.uav_array, lc, &angles.ug[k]), a0 / d.ug[k]))
        .collect();
    let ris_side = steering_vector(&s.ris_array, lc, &angles.ur);
    let uav_to_ris = steering_vector(&s.uav_array, lc, &angles.ur);
    let h_ur = ComplexMatrix::outer(&ris_side, &uav_to_ris, ur_scale(s, d.ur));
    let h_rg = (0..s.num_ues())
        .map(|k| {
            steering_vector(&s.ris_array, lc, &angles.rg[k])
                .into_iter()
                .map(|z| z.conj() * (a0 / d.rg[k]))
                .collect()
        })
        .collect();
    ChannelSet {
        h_bu,
        h_ug,
        h_ur,
        uav_to_ris,
        h_rg,
        distances: d,
    }
}

/// RIS phases φ[element][k][waypoint], element in Kronecker order.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPhaseProfile {
    elements: usize,
    ues: usize,
    waypoints: usize,
    phi: Vec<f64>,
}

impl RisPhaseProfile {
    pub fn zeros(elements: usize, ues: usize, waypoints: usize) -> Self {
        Self {
            elements,
            ues,
            waypoints,
            phi: vec![0.0; elements * ues * waypoints],
        }
    }

    /// Closed-form profile along a sequence of UAV positions.
    pub fn optimal_along(s: &ScenarioConfig, positions: &[[f64; 2]]) -> Self {
        let mut p = Self::zeros(s.ris_array.elements(), s.num_ues(), positions.len());
        for (n, &z) in positions.iter().enumerate() {
            let angles = link_angles(s, z);
            for k in 0..s.num_ues() {
                for (m, v) in optimal_ris_phase(&angles, s, k).into_iter().enumerate() {
                    p.set(m, k, n, v);
                }
            }
        }
        p
    }

    fn index(&self, m: usize, k: usize, n: usize) -> usize {
        (n * self.ues + k) * self.elements + m
    }

    pub fn get(&self, m: usize, k: usize, n: usize) -> f64 {
        self.phi[self.index(m, k, n)]
    }

    /// Stores `value` reduced into `[0, 2π)`.
    pub fn set(&mut self, m: usize, k: usize, n: usize, value: f64) {
        let i = self.index(m, k, n);
        self.phi[i] = wrap_phase(value);
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn waypoints(&self) -> usize {
        self.waypoints
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }
}

pub(crate) fn wrap_phase(v: f64) -> f64 {
    let w = v.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Diagonal RIS reflection matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    pub diag: Vec<Complex64>,
}

impl PhaseMatrix {
    pub fn from_phases(phases: &[f64]) -> Self {
        Self {
            diag: phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect(),
        }
    }
}

pub fn ris_phase_matrix(profile: &RisPhaseProfile, k: usize, n: usize) -> PhaseMatrix {
    let phases: Vec<f64> = (0..profile.elements()).map(|m| profile.get(m, k, n)).collect();
    PhaseMatrix::from_phases(&phases)
}

/// Effective UAV→RIS→UE_k row vector `h_RGᴴ Φ H_UR` (length M_U).
pub fn cascade_channel(ch: &ChannelSet, phase: &PhaseMatrix, k: usize) -> Result<Vec<Complex64>> {
    let h_rg = ch
        .h_rg
        .get(k)
        .ok_or_else(|| Error::Dimension(format!("no RIS-UE channel for UE {k}")))?;
    let m_r = ch.h_ur.rows;
    if h_rg.len() != m_r || phase.diag.len() != m_r {
        return Err(Error::Dimension(format!(
            "RIS size {m_r}, h_RG length {}, phase matrix size {}",
            h_rg.len(),
            phase.diag.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); ch.h_ur.cols];
    for m in 0..m_r {
        let a = h_rg[m].conj() * phase.diag[m];
        for (u, o) in out.iter_mut().enumerate() {
            *o += a * ch.h_ur.get(m, u);
        }
    }
    Ok(out)
}

/// Co-phasing RIS configuration for UE `k`, reduced into `[0, 2π)`.
pub fn optimal_ris_phase(angles: &LinkAngles, s: &ScenarioConfig, k: usize) -> Vec<f64> {
    let lc = s.carrier_wavelength;
    progression(&s.ris_array, lc, &angles.ur)
        .zip(progression(&s.ris_array, lc, &angles.rg[k]))
        .map(|(a, b)| wrap_phase(a + b))
        .collect()
}

/// MRT beamformer: the channel direction with unit norm.
pub fn mrt_beamformer(h: &[Complex64]) -> Vec<Complex64> {
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    h.iter().map(|z| z / norm).collect()
}

/// `|hᴴ w|`.
pub fn beamformed_gain(h: &[Complex64], w: &[Complex64]) -> f64 {
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
}

/// `|row · w|` for a row-vector channel such as the cascade.
pub fn row_gain(row: &[Complex64], w: &[Complex64]) -> f64 {
    row.iter().zip(w).map(|(a, b)| a * b).sum::<Complex64>().norm()
}

/// Closed-form beamformed gains under MRT and co-phased RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGains {
    pub bu: f64,
    pub ug: Vec<f64>,
    pub urg: Vec<f64>,
}

pub fn mrt_effective_gains(d: &LinkDistances, s: &ScenarioConfig) -> EffectiveGains {
    let a0 = s.alpha0();
    let m_b = s.bs_array.elements() as f64;
    let m_u = s.uav_array.elements() as f64;
    let m_r = s.ris_array.elements() as f64;
    let cascade_ref = if s.cascade_two_hop_pathloss { a0 * a0 } else { a0 };
    EffectiveGains {
        bu: m_b.sqrt() * a0 / d.bu,
        ug: d.ug.iter().map(|&x| m_u.sqrt() * a0 / x).collect(),
        urg: d.rg.iter().map(|&x| m_u.sqrt() * m_r * cascade_ref / (x * d.ur)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_scenario;
    use std::f64::consts::PI;

    fn grid(nx: usize, ny: usize, d: f64) -> ArrayGeometry {
        ArrayGeometry { nx, ny, dx: d, dy: d }
    }

    #[test]
    fn single_element_steering() {
        let a = LinkAngle { sin_theta: 0.7, sin_xi: 0.6, cos_xi: 0.8 };
        assert_eq!(steering_vector(&grid(1, 1, 0.005), 0.01, &a), vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn broadside_is_all_ones() {
        let a = LinkAngle { sin_theta: 0.0, sin_xi: 0.6, cos_xi: 0.8 };
        for z in steering_vector(&grid(3, 4, 0.005), 0.01, &a) {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn half_wavelength_endfire_phases() {
        let a = LinkAngle { sin_theta: 1.0, sin_xi: 0.0, cos_xi: 1.0 };
        let v = steering_vector(&grid(2, 1, 0.005), 0.01, &a);
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // e^{-jπ}
        assert!((v[1] - Complex64::from_polar(1.0, -PI)).norm() < 1e-15);
    }

    #[test]
    fn overhead_elevation_and_azimuth_fallback() {
        let (s, _) = baseline_scenario();
        let ang = link_angles(&s, s.ue_positions[1]);
        assert!((ang.ug[1].sin_theta - 1.0).abs() < 1e-15);
        assert_eq!((ang.ug[1].sin_xi, ang.ug[1].cos_xi), (0.0, 1.0));
        let at_ris = link_angles(&s, s.ris_position);
        assert_eq!((at_ris.ur.sin_xi, at_ris.ur.cos_xi), (0.0, 1.0));
    }

    #[test]
    fn bs_elevation_uses_bs_height_over_distance() {
        let (s, _) = baseline_scenario();
        let ang = link_angles(&s, [100.0, 0.0]);
        let d = (100.0f64.powi(2) + 5.0f64.powi(2)).sqrt();
        assert!((ang.bu.sin_theta - 15.0 / d).abs() < 1e-15);
        assert_eq!((ang.bu.sin_xi, ang.bu.cos_xi), (1.0, 0.0));
    }

    #[test]
    fn scalar_channel_with_single_antenna() {
        let (mut s, _) = baseline_scenario();
        s.bs_array = grid(1, 1, 0.005);
        let ch = build_channels(&s, [120.0, 80.0]);
        assert_eq!(ch.h_bu.len(), 1);
        assert!((ch.h_bu[0] - Complex64::new(s.alpha0() / ch.distances.bu, 0.0)).norm() < 1e-18);
    }

    #[test]
    fn uav_ris_matrix_has_rank_one() {
        let (s, _) = baseline_scenario();
        let ch = build_channels(&s, [210.0, 330.0]);
        assert_eq!((ch.h_ur.rows, ch.h_ur.cols), (100, 16));
        assert_eq!(ch.h_ur.rank(1e-9), 1);
    }

    #[test]
    fn phase_matrix_special_cases() {
        let mut p = RisPhaseProfile::zeros(4, 1, 1);
        let ident = ris_phase_matrix(&p, 0, 0);
        assert!(ident.diag.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        for m in 0..4 {
            p.set(m, 0, 0, PI);
        }
        let neg = ris_phase_matrix(&p, 0, 0);
        assert!(neg.diag.iter().all(|z| (z + Complex64::new(1.0, 0.0)).norm() < 1e-15));
        for (m, v) in [0.3, -2.0, 7.0, 100.0].into_iter().enumerate() {
            p.set(m, 0, 0, v);
        }
        assert!(ris_phase_matrix(&p, 0, 0).diag.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cascade_rejects_mismatched_phase() {
        let (s, _) = baseline_scenario();
        let ch = build_channels(&s, [10.0, 10.0]);
        let bad = PhaseMatrix::from_phases(&[0.0; 3]);
        assert!(matches!(cascade_channel(&ch, &bad, 0), Err(Error::Dimension(_))));
        let ok = PhaseMatrix::from_phases(&[0.0; 100]);
        assert!(cascade_channel(&ch, &ok, 7).is_err());
    }

    #[test]
    fn single_element_ris_cascade_is_scalar_product() {
        let (mut s, _) = baseline_scenario();
        s.ris_array = grid(1, 1, 0.005);
        s.uav_array = grid(1, 1, 0.005);
        let ch = build_channels(&s, [300.0, 100.0]);
        let phase = PhaseMatrix::from_phases(&[0.4]);
        let c = cascade_channel(&ch, &phase, 2).unwrap();
        let expected = ch.h_rg[2][0].conj() * phase.diag[0] * ch.h_ur.get(0, 0);
        assert_eq!(c.len(), 1);
        assert!((c[0] - expected).norm() < 1e-20);
    }

    #[test]
    fn first_ris_element_phase_is_zero_and_zero_angles_give_zero() {
        let (s, _) = baseline_scenario();
        let ang = link_angles(&s, [123.0, 321.0]);
        for k in 0..3 {
            assert_eq!(optimal_ris_phase(&ang, &s, k)[0], 0.0);
        }
        let flat = LinkAngle { sin_theta: 0.0, sin_xi: 0.0, cos_xi: 1.0 };
        let zero = LinkAngles { bu: flat, ug: vec![flat], ur: flat, rg: vec![flat] };
        assert!(optimal_ris_phase(&zero, &s, 0).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn effective_gain_closed_forms() {
        let (mut s, _) = baseline_scenario();
        s.bs_array = grid(1, 1, 0.005);
        let d = LinkDistances { bu: 1.0, ug: vec![100.0], ur: 50.0, rg: vec![100.0] };
        let g = mrt_effective_gains(&d, &s);
        assert!((g.bu - s.alpha0()).abs() < 1e-18);
        let d2 = LinkDistances { bu: 2.0, ..d.clone() };
        assert!((mrt_effective_gains(&d2, &s).bu - s.alpha0() / 2.0).abs() < 1e-18);
        // M_U = 16, M_R = 100, d_RG = 100, d_UR = 50
        let expected = 4.0 * 100.0 * s.alpha0() / 5000.0;
        assert!((g.urg[0] / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_phase_stays_in_range() {
        for v in [-1e-18, -TAU, TAU, 3.0 * TAU + 0.1, -0.5] {
            let w = wrap_phase(v);
            assert!((0.0..TAU).contains(&w), "{v} -> {w}");
        }
    }
}
