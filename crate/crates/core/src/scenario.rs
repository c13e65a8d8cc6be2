//! Scenario parameters, their on-disk representation and validation.
//!
//! A scenario file is TOML with three sections. Every key is optional; a
//! missing key takes the baseline value listed below.
//!
//! ```toml
//! [scenario]
//! area = [500.0, 500.0]                 # width, height (m)
//! ue_positions = [[20.0, 450.0], [250.0, 0.0], [500.0, 200.0]]
//! bs_position = [0.0, 0.0]
//! bs_height = 15.0
//! ris_position = [500.0, 0.0]           # not published, see README
//! ris_height = 10.0
//! uav_start = [0.0, 0.0]
//! uav_end = [500.0, 500.0]
//! uav_height = 20.0
//! n_steps = 50                          # flight slots; N + 1 waypoints
//! tau = 1.0                             # s
//! v_max = 20.0                          # m/s
//! v_acc = 4.0                           # m/s^2
//! pi_min = 0.1                          # m/s, hover guard for the induced term
//! r_min = 0.257                         # bits/s/Hz, scalar or one value per UE
//! energy_budget_multiplier = 1.5        # E_max = multiplier * E_min
//! alpha0_db = -61.0                     # reference power gain at 1 m (dB)
//! noise_dbm = -174.0                    # noise power in the normalized band
//! carrier_wavelength = 0.01             # m
//! bs_array = [4, 4]
//! uav_array = [4, 4]
//! ris_array = [10, 10]
//! bs_spacing = [0.005, 0.005]           # default: carrier_wavelength / 2
//! uav_spacing = [0.005, 0.005]
//! ris_spacing = [0.005, 0.005]
//! cascade_two_hop_pathloss = false      # true: alpha0^2 across UAV-RIS-UE
//! tie_link_powers = false               # true: P_k,direct == P_k,ris
//! max_bs_power_w = 10.0
//! max_uav_power_w = 1.0                 # total over all UAV links per slot
//!
//! [energy]
//! omega = 300.0                         # blade angular velocity (rad/s)
//! rotor_radius = 0.4
//! air_density = 1.225
//! rotor_solidity = 0.05
//! rotor_disc_area = 0.503
//! induced_velocity = 4.03
//! fuselage_drag = 0.3
//! blade_power = 79.86                   # W
//! induced_power = 88.63                 # W
//!
//! [solver]
//! max_iterations = 30
//! convergence_tol = 1e-3
//! solver_tol = 1e-6
//! rng_seed = 0
//! trust_radius = 50.0                   # m
//! trust_retries = 3
//! inner_iterations = 20
//! initial_power_rate = 1.0              # bits/s/Hz used to size the initial powers
//! objective = "slack-sum"               # or "propulsion"
//! weight_direct = 1.0
//! weight_ris = 1.0
//! weight_bs = 1.0
//! ```
//!
//! Lengths are meters and powers watts everywhere inside the library; dB and
//! dBm only appear at the file boundary.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform planar array: element counts and spacings along x and y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl ArrayGeometry {
    pub fn elements(&self) -> usize {
        self.nx * self.ny
    }
}

/// Geometry, radio and kinematic parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub area: [f64; 2],
    pub ue_positions: Vec<[f64; 2]>,
    pub bs_position: [f64; 2],
    pub bs_height: f64,
    pub ris_position: [f64; 2],
    pub ris_height: f64,
    pub uav_start: [f64; 2],
    pub uav_end: [f64; 2],
    pub uav_height: f64,
    pub n_steps: usize,
    pub tau: f64,
    pub v_max: f64,
    pub v_acc: f64,
    pub pi_min: f64,
    /// Minimum spectral efficiency per UE (bits/s/Hz).
    pub r_min: Vec<f64>,
    pub energy_budget_multiplier: f64,
    pub alpha0_db: f64,
    pub noise_dbm: f64,
    pub carrier_wavelength: f64,
    pub bs_array: ArrayGeometry,
    pub uav_array: ArrayGeometry,
    pub ris_array: ArrayGeometry,
    pub cascade_two_hop_pathloss: bool,
    pub tie_link_powers: bool,
    pub max_bs_power_w: f64,
    pub max_uav_power_w: f64,
}

impl ScenarioConfig {
    pub fn num_ues(&self) -> usize {
        self.ue_positions.len()
    }

    /// Amplitude reference gain α0 at 1 m.
    pub fn alpha0(&self) -> f64 {
        10f64.powf(self.alpha0_db / 20.0)
    }

    /// Noise power σ² in watts.
    pub fn noise_power(&self) -> f64 {
        10f64.powf((self.noise_dbm - 30.0) / 10.0)
    }

    /// Waypoint count of a trajectory (N flight slots, N + 1 positions).
    pub fn num_waypoints(&self) -> usize {
        self.n_steps + 1
    }

    pub fn bs_point(&self) -> [f64; 3] {
        [self.bs_position[0], self.bs_position[1], self.bs_height]
    }

    pub fn ris_point(&self) -> [f64; 3] {
        [self.ris_position[0], self.ris_position[1], self.ris_height]
    }

    pub fn ue_point(&self, k: usize) -> [f64; 3] {
        let p = self.ue_positions[k];
        [p[0], p[1], 0.0]
    }

    pub fn uav_point(&self, xy: [f64; 2]) -> [f64; 3] {
        [xy[0], xy[1], self.uav_height]
    }

    /// Sets the same minimum rate for every UE.
    pub fn set_uniform_rate(&mut self, r_min: f64) {
        self.r_min = vec![r_min; self.num_ues()];
    }

    /// Replaces the UE set, broadcasting the first rate requirement.
    pub fn set_ues(&mut self, positions: Vec<[f64; 2]>) {
        let r = self.r_min.first().copied().unwrap_or(0.257);
        self.ue_positions = positions;
        self.set_uniform_rate(r);
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be > 0, got {v}")))
            }
        };
        positive("area", self.area[0].min(self.area[1]))?;
        if self.ue_positions.is_empty() {
            return Err(Error::validation("ue_positions", "at least one UE is required"));
        }
        if self.r_min.len() != self.num_ues() {
            return Err(Error::validation(
                "r_min",
                format!("{} values for {} UEs", self.r_min.len(), self.num_ues()),
            ));
        }
        for &r in &self.r_min {
            positive("r_min", r)?;
        }
        if self.n_steps < 2 {
            return Err(Error::validation("n_steps", "must be >= 2"));
        }
        positive("tau", self.tau)?;
        positive("v_max", self.v_max)?;
        positive("v_acc", self.v_acc)?;
        positive("pi_min", self.pi_min)?;
        if self.pi_min > self.v_max {
            return Err(Error::validation("pi_min", "must not exceed v_max"));
        }
        positive("bs_height", self.bs_height)?;
        positive("ris_height", self.ris_height)?;
        positive("uav_height", self.uav_height)?;
        if self.uav_height <= self.ris_height {
            return Err(Error::validation(
                "ris_height",
                format!(
                    "height ordering requires uav_height ({}) > ris_height ({})",
                    self.uav_height, self.ris_height
                ),
            ));
        }
        if !(self.energy_budget_multiplier >= 1.0) {
            return Err(Error::validation(
                "energy_budget_multiplier",
                format!("must be >= 1, got {}", self.energy_budget_multiplier),
            ));
        }
        positive("carrier_wavelength", self.carrier_wavelength)?;
        if !self.alpha0_db.is_finite() {
            return Err(Error::validation("alpha0_db", "must be finite"));
        }
        if !self.noise_dbm.is_finite() {
            return Err(Error::validation("noise_dbm", "must be finite"));
        }
        for (field, a) in [
            ("bs_array", self.bs_array),
            ("uav_array", self.uav_array),
            ("ris_array", self.ris_array),
        ] {
            if a.nx == 0 || a.ny == 0 {
                return Err(Error::validation(field, "element counts must be >= 1"));
            }
            if !(a.dx > 0.0 && a.dy > 0.0) {
                return Err(Error::validation(field, "element spacings must be > 0"));
            }
        }
        positive("max_bs_power_w", self.max_bs_power_w)?;
        positive("max_uav_power_w", self.max_uav_power_w)?;
        let span = dist2(self.uav_start, self.uav_end);
        let reach = self.n_steps as f64 * self.tau * self.v_max;
        if span > reach {
            return Err(Error::validation(
                "uav_end",
                format!("endpoints {span:.3} m apart, reachable distance is {reach:.3} m"),
            ));
        }
        Ok(())
    }
}

/// Rotary-wing propulsion model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyParams {
    pub omega: f64,
    pub rotor_radius: f64,
    pub air_density: f64,
    pub rotor_solidity: f64,
    /// Stored as printed in the source table (units m³ there).
    pub rotor_disc_area: f64,
    pub induced_velocity: f64,
    pub fuselage_drag: f64,
    pub blade_power: f64,
    pub induced_power: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            omega: 300.0,
            rotor_radius: 0.4,
            air_density: 1.225,
            rotor_solidity: 0.05,
            rotor_disc_area: 0.503,
            induced_velocity: 4.03,
            fuselage_drag: 0.3,
            blade_power: 79.86,
            induced_power: 88.63,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("rotor_radius", self.rotor_radius),
            ("air_density", self.air_density),
            ("rotor_solidity", self.rotor_solidity),
            ("rotor_disc_area", self.rotor_disc_area),
            ("induced_velocity", self.induced_velocity),
            ("fuselage_drag", self.fuselage_drag),
            ("blade_power", self.blade_power),
            ("induced_power", self.induced_power),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Objective used by the trajectory subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryObjective {
    /// Weighted sum of the squared-distance slacks.
    SlackSum,
    /// Total propulsion energy over the flight.
    Propulsion,
}

/// Iteration and tolerance controls for one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimControls {
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub solver_tol: f64,
    pub rng_seed: u64,
    pub trust_radius: f64,
    pub trust_retries: usize,
    pub inner_iterations: usize,
    pub initial_power_rate: f64,
    pub objective: TrajectoryObjective,
    pub weight_direct: f64,
    pub weight_ris: f64,
    pub weight_bs: f64,
}

impl Default for SimControls {
    fn default() -> Self {
        Self {
            max_iterations: 30,
            convergence_tol: 1e-3,
            solver_tol: 1e-6,
            rng_seed: 0,
            trust_radius: 50.0,
            trust_retries: 3,
            inner_iterations: 20,
            initial_power_rate: 1.0,
            objective: TrajectoryObjective::SlackSum,
            weight_direct: 1.0,
            weight_ris: 1.0,
            weight_bs: 1.0,
        }
    }
}

impl SimControls {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::validation("max_iterations", "must be >= 1"));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::validation("convergence_tol", "must be > 0"));
        }
        if !(self.solver_tol > 0.0) {
            return Err(Error::validation("solver_tol", "must be > 0"));
        }
        if !(self.trust_radius > 0.0) {
            return Err(Error::validation("trust_radius", "must be > 0"));
        }
        if self.inner_iterations == 0 {
            return Err(Error::validation("inner_iterations", "must be >= 1"));
        }
        if !(self.initial_power_rate >= 0.0) {
            return Err(Error::validation("initial_power_rate", "must be >= 0"));
        }
        for (field, w) in [
            ("weight_direct", self.weight_direct),
            ("weight_ris", self.weight_ris),
            ("weight_bs", self.weight_bs),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::validation(field, "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Everything a scenario file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub scenario: ScenarioConfig,
    pub energy: EnergyParams,
    pub controls: SimControls,
}

/// Table II scenario plus the documented defaults for unpublished values
/// (antenna grids, spacings, wavelength, N, τ, RIS location, budget).
pub fn baseline_scenario() -> (ScenarioConfig, EnergyParams) {
    let lambda_c = 0.01;
    let half = lambda_c / 2.0;
    let grid = |n: usize| ArrayGeometry {
        nx: n,
        ny: n,
        dx: half,
        dy: half,
    };
    let scenario = ScenarioConfig {
        area: [500.0, 500.0],
        ue_positions: vec![[20.0, 450.0], [250.0, 0.0], [500.0, 200.0]],
        bs_position: [0.0, 0.0],
        bs_height: 15.0,
        ris_position: [500.0, 0.0],
        ris_height: 10.0,
        uav_start: [0.0, 0.0],
        uav_end: [500.0, 500.0],
        uav_height: 20.0,
        n_steps: 50,
        tau: 1.0,
        v_max: 20.0,
        v_acc: 4.0,
        pi_min: 0.1,
        r_min: vec![0.257; 3],
        energy_budget_multiplier: 1.5,
        alpha0_db: -61.0,
        noise_dbm: -174.0,
        carrier_wavelength: lambda_c,
        bs_array: grid(4),
        uav_array: grid(4),
        ris_array: grid(10),
        cascade_two_hop_pathloss: false,
        tie_link_powers: false,
        max_bs_power_w: 10.0,
        max_uav_power_w: 1.0,
    };
    (scenario, EnergyParams::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RateSpec {
    Scalar(f64),
    PerUe(Vec<f64>),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    area: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ue_positions: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs_position: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs_height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ris_position: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ris_height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uav_start: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uav_end: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uav_height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_acc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_min: Option<RateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_budget_multiplier: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha0_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_dbm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier_wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs_array: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uav_array: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ris_array: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs_spacing: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uav_spacing: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ris_spacing: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cascade_two_hop_pathloss: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tie_link_powers: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_bs_power_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_uav_power_w: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDocument {
    #[serde(default)]
    scenario: ScenarioSection,
    #[serde(default)]
    energy: EnergyParams,
    #[serde(default)]
    solver: SimControls,
}

impl ScenarioSection {
    fn resolve(self) -> ScenarioConfig {
        let (base, _) = baseline_scenario();
        let lambda_c = self.carrier_wavelength.unwrap_or(base.carrier_wavelength);
        let half = lambda_c / 2.0;
        let array = |counts: Option<[usize; 2]>, spacing: Option<[f64; 2]>, def: ArrayGeometry| {
            let [nx, ny] = counts.unwrap_or([def.nx, def.ny]);
            let [dx, dy] = spacing.unwrap_or([half, half]);
            ArrayGeometry { nx, ny, dx, dy }
        };
        let ue_positions = self.ue_positions.unwrap_or(base.ue_positions);
        let k = ue_positions.len();
        let r_min = match self.r_min {
            None => vec![base.r_min[0]; k],
            Some(RateSpec::Scalar(r)) => vec![r; k],
            Some(RateSpec::PerUe(v)) => v,
        };
        ScenarioConfig {
            area: self.area.unwrap_or(base.area),
            ue_positions,
            bs_position: self.bs_position.unwrap_or(base.bs_position),
            bs_height: self.bs_height.unwrap_or(base.bs_height),
            ris_position: self.ris_position.unwrap_or(base.ris_position),
            ris_height: self.ris_height.unwrap_or(base.ris_height),
            uav_start: self.uav_start.unwrap_or(base.uav_start),
            uav_end: self.uav_end.unwrap_or(base.uav_end),
            uav_height: self.uav_height.unwrap_or(base.uav_height),
            n_steps: self.n_steps.unwrap_or(base.n_steps),
            tau: self.tau.unwrap_or(base.tau),
            v_max: self.v_max.unwrap_or(base.v_max),
            v_acc: self.v_acc.unwrap_or(base.v_acc),
            pi_min: self.pi_min.unwrap_or(base.pi_min),
            r_min,
            energy_budget_multiplier: self
                .energy_budget_multiplier
                .unwrap_or(base.energy_budget_multiplier),
            alpha0_db: self.alpha0_db.unwrap_or(base.alpha0_db),
            noise_dbm: self.noise_dbm.unwrap_or(base.noise_dbm),
            carrier_wavelength: lambda_c,
            bs_array: array(self.bs_array, self.bs_spacing, base.bs_array),
            uav_array: array(self.uav_array, self.uav_spacing, base.uav_array),
            ris_array: array(self.ris_array, self.ris_spacing, base.ris_array),
            cascade_two_hop_pathloss: self
                .cascade_two_hop_pathloss
                .unwrap_or(base.cascade_two_hop_pathloss),
            tie_link_powers: self.tie_link_powers.unwrap_or(base.tie_link_powers),
            max_bs_power_w: self.max_bs_power_w.unwrap_or(base.max_bs_power_w),
            max_uav_power_w: self.max_uav_power_w.unwrap_or(base.max_uav_power_w),
        }
    }

    fn from_config(c: &ScenarioConfig) -> Self {
        Self {
            area: Some(c.area),
            ue_positions: Some(c.ue_positions.clone()),
            bs_position: Some(c.bs_position),
            bs_height: Some(c.bs_height),
            ris_position: Some(c.ris_position),
            ris_height: Some(c.ris_height),
            uav_start: Some(c.uav_start),
            uav_end: Some(c.uav_end),
            uav_height: Some(c.uav_height),
            n_steps: Some(c.n_steps),
            tau: Some(c.tau),
            v_max: Some(c.v_max),
            v_acc: Some(c.v_acc),
            pi_min: Some(c.pi_min),
            r_min: Some(RateSpec::PerUe(c.r_min.clone())),
            energy_budget_multiplier: Some(c.energy_budget_multiplier),
            alpha0_db: Some(c.alpha0_db),
            noise_dbm: Some(c.noise_dbm),
            carrier_wavelength: Some(c.carrier_wavelength),
            bs_array: Some([c.bs_array.nx, c.bs_array.ny]),
            uav_array: Some([c.uav_array.nx, c.uav_array.ny]),
            ris_array: Some([c.ris_array.nx, c.ris_array.ny]),
            bs_spacing: Some([c.bs_array.dx, c.bs_array.dy]),
            uav_spacing: Some([c.uav_array.dx, c.uav_array.dy]),
            ris_spacing: Some([c.ris_array.dx, c.ris_array.dy]),
            cascade_two_hop_pathloss: Some(c.cascade_two_hop_pathloss),
            tie_link_powers: Some(c.tie_link_powers),
            max_bs_power_w: Some(c.max_bs_power_w),
            max_uav_power_w: Some(c.max_uav_power_w),
        }
    }
}

/// Parses and validates a scenario document held in memory.
pub fn parse_scenario(text: &str) -> Result<LoadedScenario> {
    let doc: ScenarioDocument = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let loaded = LoadedScenario {
        scenario: doc.scenario.resolve(),
        energy: doc.energy,
        controls: doc.solver,
    };
    loaded.scenario.validate()?;
    loaded.energy.validate()?;
    loaded.controls.validate()?;
    Ok(loaded)
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<LoadedScenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

/// Renders a fully populated scenario document.
pub fn serialize_scenario(loaded: &LoadedScenario) -> String {
    let doc = ScenarioDocument {
        scenario: ScenarioSection::from_config(&loaded.scenario),
        energy: loaded.energy,
        solver: loaded.controls.clone(),
    };
    toml::to_string(&doc).expect("scenario document is always representable as TOML")
}

pub(crate) fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
