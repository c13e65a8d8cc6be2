//! Batch runs with CSV and SVG outputs: a single scenario run plus the
//! user/rate, RIS-position and energy-budget sweeps.
//!
//! An experiment file is a scenario file with an optional `[sweep]` table:
//!
//! ```toml
//! [sweep]
//! ue_counts = [1, 2, 3, 4, 5, 6]
//! rates = [0.057, 0.257, 0.557, 0.757]   # bits/s/Hz
//! ue_layouts = []                          # explicit placements, matched by length
//! ris_positions = [[500.0, 0.0], [480.0, 220.0], [260.0, 200.0], [0.0, 250.0]]
//! draws = 50                               # random rate vectors per RIS position
//! draw_range = [0.01, 0.757]
//! multipliers = [1.0, 1.2, 1.5, 2.0]
//! ```
//!
//! Seeds come from `solver.rng_seed`. UE counts without a matching layout
//! (other than the base scenario's own count) get a seeded uniform placement
//! over the area, written to `ue_placements.csv`.

mod output;
mod svg;
mod sweep;

pub use output::{run_files, RunFiles};
pub use svg::{render_iterates_svg, render_overlay_svg};
pub use sweep::{
    rate_draws, sweep_energy_budget, sweep_ris_positions, sweep_users_rates, ue_layout, CellRecord,
    UeLayout,
};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sca::{run_joint_optimization, JointResult};
use crate::scenario::{parse_scenario, LoadedScenario, SimControls};

/// Lists swept by the three sweep commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub ue_counts: Vec<usize>,
    pub rates: Vec<f64>,
    pub ue_layouts: Vec<Vec<[f64; 2]>>,
    pub ris_positions: Vec<[f64; 2]>,
    pub draws: usize,
    pub draw_range: [f64; 2],
    pub multipliers: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ue_counts: (1..=6).collect(),
            rates: vec![0.057, 0.257, 0.557, 0.757],
            ue_layouts: Vec::new(),
            ris_positions: vec![[500.0, 0.0], [480.0, 220.0], [260.0, 200.0], [0.0, 250.0]],
            draws: 50,
            draw_range: [0.01, 0.757],
            multipliers: vec![1.0, 1.2, 1.5, 2.0],
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ue_counts.iter().any(|&k| k == 0) {
            return Err(Error::validation("sweep.ue_counts", "every count must be >= 1"));
        }
        if !self.rates.iter().all(|&r| r > 0.0 && r.is_finite()) {
            return Err(Error::validation("sweep.rates", "rates must be finite and > 0"));
        }
        if self.ue_layouts.iter().any(|l| l.is_empty()) {
            return Err(Error::validation("sweep.ue_layouts", "layouts must not be empty"));
        }
        let [lo, hi] = self.draw_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::validation("sweep.draw_range", format!("need 0 < low <= high, got [{lo}, {hi}]")));
        }
        if self.draws == 0 {
            return Err(Error::validation("sweep.draws", "must be >= 1"));
        }
        if !self.multipliers.iter().all(|&m| m >= 1.0 && m.is_finite()) {
            return Err(Error::validation("sweep.multipliers", "multipliers must be >= 1"));
        }
        Ok(())
    }
}

/// A scenario plus its sweep lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub loaded: LoadedScenario,
    pub sweep: SweepConfig,
}

impl Experiment {
    pub fn baseline() -> Self {
        let (scenario, energy) = crate::scenario::baseline_scenario();
        Self {
            loaded: LoadedScenario { scenario, energy, controls: SimControls::default() },
            sweep: SweepConfig::default(),
        }
    }
}

/// Parses a scenario document with an optional `[sweep]` table.
pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let sweep: SweepConfig = match table.remove("sweep") {
        Some(v) => v.try_into().map_err(|e: toml::de::Error| Error::Parse(format!("[sweep]: {e}")))?,
        None => SweepConfig::default(),
    };
    let rest = toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))?;
    let loaded = parse_scenario(&rest)?;
    sweep.validate()?;
    Ok(Experiment { loaded, sweep })
}

pub fn load_experiment(path: impl AsRef<Path>) -> Result<Experiment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_experiment(&text)
}

/// Command-line overrides of the solver controls.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, exp: &mut Experiment) -> Result<()> {
        let c = &mut exp.loaded.controls;
        if let Some(s) = self.seed {
            c.rng_seed = s;
        }
        if let Some(m) = self.max_iter {
            c.max_iterations = m;
        }
        if let Some(t) = self.tol {
            c.convergence_tol = t;
        }
        c.validate()
    }
}

/// Runs the joint optimization and writes the run files plus
/// `trajectory.svg` into `out_dir`.
pub fn run_scenario(exp: &Experiment, out_dir: &Path) -> Result<JointResult> {
    let LoadedScenario { scenario: s, energy: e, controls } = &exp.loaded;
    let result = run_joint_optimization(s, e, controls)?;
    let files = run_files(s, e, &result);
    let svg = render_iterates_svg(&files.iterates, &files.nodes)?;
    output::write_all(out_dir, files.named().into_iter().chain([("trajectory.svg", svg.as_str())]))?;
    Ok(result)
}
