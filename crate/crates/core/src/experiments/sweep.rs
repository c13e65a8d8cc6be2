//! Sweep drivers. Cells run in parallel on a dedicated rayon pool and are
//! collected in declaration order, so outputs do not depend on `jobs`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::output::{self, nodes_csv, num, run_files, sci, write_all, write_atomic, Table};
use super::svg::{render_iterates_svg, render_overlay_svg};
use super::Experiment;
use crate::error::{Error, Result};
use crate::sca::{run_joint_optimization, ScaStatus};
use crate::scenario::{EnergyParams, ScenarioConfig, SimControls};

/// Outcome of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub label: String,
    pub scenario: ScenarioConfig,
    pub status: ScaStatus,
    pub p_total: f64,
    /// Mean per-slot, per-UE power on the UAV–UE links (W).
    pub avg_p_los: f64,
    /// Mean per-slot, per-UE power on the UAV–RIS–UE links (W).
    pub avg_p_ris: f64,
    pub path_length: f64,
    /// Largest distance from the straight start–end segment (m).
    pub deviation: f64,
    pub energy: f64,
    pub energy_budget: f64,
    pub iterations: usize,
    pub message: Option<String>,
    pub trajectory_csv: String,
}

impl CellRecord {
    pub fn feasible(&self) -> bool {
        matches!(self.status, ScaStatus::Converged | ScaStatus::MaxIterations)
    }
}

/// Where a UE placement came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeLayout {
    Base,
    Listed,
    Seeded,
}

impl UeLayout {
    fn as_str(self) -> &'static str {
        match self {
            UeLayout::Base => "base",
            UeLayout::Listed => "listed",
            UeLayout::Seeded => "seeded",
        }
    }
}

/// UE positions for a sweep over `k` users.
pub fn ue_layout(exp: &Experiment, k: usize) -> (Vec<[f64; 2]>, UeLayout) {
    let s = &exp.loaded.scenario;
    if k == s.num_ues() {
        return (s.ue_positions.clone(), UeLayout::Base);
    }
    if let Some(l) = exp.sweep.ue_layouts.iter().find(|l| l.len() == k) {
        return (l.clone(), UeLayout::Listed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(exp.loaded.controls.rng_seed);
    rng.set_stream(k as u64);
    let pts = (0..k)
        .map(|_| [rng.gen_range(0.0..=s.area[0]), rng.gen_range(0.0..=s.area[1])])
        .collect();
    (pts, UeLayout::Seeded)
}

/// Seeded per-UE rate vectors, one per draw, uniform in `draw_range`.
pub fn rate_draws(exp: &Experiment) -> Vec<Vec<f64>> {
    let [lo, hi] = exp.sweep.draw_range;
    let k = exp.loaded.scenario.num_ues();
    let mut rng = ChaCha8Rng::seed_from_u64(exp.loaded.controls.rng_seed);
    (0..exp.sweep.draws)
        .map(|_| (0..k).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect()
}

struct Cell {
    label: String,
    scenario: ScenarioConfig,
}

fn run_cell(cell: &Cell, e: &EnergyParams, c: &SimControls, dir: &Path) -> Result<CellRecord> {
    let s = &cell.scenario;
    let r = run_joint_optimization(s, e, c)?;
    let files = run_files(s, e, &r);
    let svg = render_iterates_svg(&files.iterates, &files.nodes)?;
    write_all(dir, files.named().into_iter().chain([("trajectory.svg", svg.as_str())]))?;
    Ok(CellRecord {
        label: cell.label.clone(),
        scenario: s.clone(),
        status: r.status(),
        p_total: r.p_total(),
        avg_p_los: r.powers.mean_direct(),
        avg_p_ris: r.powers.mean_ris(),
        path_length: r.trajectory.path_length(),
        deviation: r.trajectory.max_deviation(s.uav_start, s.uav_end),
        energy: r.trajectory.energy(s, e).unwrap_or(f64::NAN),
        energy_budget: r.energy_budget,
        iterations: r.state.iteration,
        message: r.message.clone(),
        trajectory_csv: files.trajectory,
    })
}

fn run_cells(exp: &Experiment, cells: &[Cell], out_dir: &Path, jobs: usize) -> Result<Vec<CellRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Backend(format!("thread pool: {e}")))?;
    let (e, c) = (&exp.loaded.energy, &exp.loaded.controls);
    let cells_dir = out_dir.join("cells");
    pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(cell, e, c, &cells_dir.join(&cell.label)))
            .collect()
    })
}

fn status_field(r: &CellRecord) -> String {
    r.status.as_str().to_string()
}

fn overlay(title: &str, records: &[&CellRecord], label: impl Fn(&CellRecord) -> String) -> Result<String> {
    let paths: Vec<(String, String)> = records.iter().map(|r| (label(r), r.trajectory_csv.clone())).collect();
    let nodes = nodes_csv(&records.first().expect("at least one cell").scenario);
    render_overlay_svg(title, &paths, &nodes)
}

/// Runs every (K, R_min) pair of the sweep lists.
///
/// Writes `ue_placements.csv`, `avg_power_by_link.csv`, `total_power.csv`,
/// one `trajectories_K{K}.svg` per UE count and a run directory per cell
/// under `cells/`. Infeasible cells are recorded, not fatal.
pub fn sweep_users_rates(exp: &Experiment, out_dir: &Path, jobs: usize) -> Result<Vec<CellRecord>> {
    exp.sweep.validate()?;
    let mut placements = Table::new(["K", "k", "x", "y", "source"]);
    let mut cells = Vec::new();
    for &k in &exp.sweep.ue_counts {
        let (ues, source) = ue_layout(exp, k);
        for (i, p) in ues.iter().enumerate() {
            placements.row([k.to_string(), (i + 1).to_string(), num(p[0]), num(p[1]), source.as_str().to_string()]);
        }
        for &r in &exp.sweep.rates {
            let mut s = exp.loaded.scenario.clone();
            s.ue_positions = ues.clone();
            s.set_uniform_rate(r);
            cells.push(Cell { label: format!("K{k}_R{r}"), scenario: s });
        }
    }
    let records = run_cells(exp, &cells, out_dir, jobs)?;

    let mut by_link = Table::new(["K", "R_min", "status", "avg_p_los", "avg_p_ris"]);
    let mut total = Table::new(["K", "R_min", "status", "P_total", "deviation_m", "path_length_m", "iterations"]);
    for r in &records {
        let (k, rate) = (r.scenario.num_ues().to_string(), num(r.scenario.r_min[0]));
        by_link.row([k.clone(), rate.clone(), status_field(r), sci(r.avg_p_los), sci(r.avg_p_ris)]);
        total.row([
            k,
            rate,
            status_field(r),
            sci(r.p_total),
            num(r.deviation),
            num(r.path_length),
            r.iterations.to_string(),
        ]);
    }
    let mut files = vec![
        ("ue_placements.csv".to_string(), placements.finish()),
        ("avg_power_by_link.csv".to_string(), by_link.finish()),
        ("total_power.csv".to_string(), total.finish()),
    ];
    for &k in &exp.sweep.ue_counts {
        let group: Vec<&CellRecord> = records.iter().filter(|r| r.scenario.num_ues() == k).collect();
        if !group.is_empty() {
            let svg = overlay(&format!("Optimal trajectories, K = {k}"), &group, |r| format!("R_min {}", r.scenario.r_min[0]))?;
            files.push((format!("trajectories_K{k}.svg"), svg));
        }
    }
    write_all(out_dir, files.iter().map(|(n, t)| (n.as_str(), t.as_str())))?;
    Ok(records)
}

/// Runs every RIS position against the same seeded rate draws.
///
/// Writes `ris_draws.csv`, `ris_link_power.csv` (one row per position and
/// draw), `ris_summary.csv` (means over feasible draws) and one
/// `trajectories_ris{i}.svg` per position.
pub fn sweep_ris_positions(exp: &Experiment, out_dir: &Path, jobs: usize) -> Result<Vec<CellRecord>> {
    exp.sweep.validate()?;
    let draws = rate_draws(exp);
    let mut draw_tab = Table::new(["draw", "k", "r_min"]);
    for (d, rates) in draws.iter().enumerate() {
        for (k, r) in rates.iter().enumerate() {
            draw_tab.row([d.to_string(), (k + 1).to_string(), num(*r)]);
        }
    }
    let mut cells = Vec::new();
    for (i, &pos) in exp.sweep.ris_positions.iter().enumerate() {
        for (d, rates) in draws.iter().enumerate() {
            let mut s = exp.loaded.scenario.clone();
            s.ris_position = pos;
            s.r_min = rates.clone();
            cells.push(Cell { label: format!("ris{i}_d{d:02}"), scenario: s });
        }
    }
    let records = run_cells(exp, &cells, out_dir, jobs)?;

    let mut power = Table::new(["position", "ris_x", "ris_y", "draw", "status", "avg_p_los", "avg_p_ris", "P_total"]);
    let mut summary = Table::new(["position", "ris_x", "ris_y", "feasible_draws", "mean_p_los", "mean_p_ris"]);
    let mut files = Vec::new();
    for (i, chunk) in records.chunks(draws.len()).enumerate() {
        let pos = exp.sweep.ris_positions[i];
        for (d, r) in chunk.iter().enumerate() {
            power.row([
                i.to_string(),
                num(pos[0]),
                num(pos[1]),
                d.to_string(),
                status_field(r),
                sci(r.avg_p_los),
                sci(r.avg_p_ris),
                sci(r.p_total),
            ]);
        }
        let ok: Vec<&CellRecord> = chunk.iter().filter(|r| r.feasible()).collect();
        let mean = |f: fn(&CellRecord) -> f64| {
            if ok.is_empty() {
                String::new()
            } else {
                sci(ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64)
            }
        };
        summary.row([
            i.to_string(),
            num(pos[0]),
            num(pos[1]),
            ok.len().to_string(),
            mean(|r| r.avg_p_los),
            mean(|r| r.avg_p_ris),
        ]);
        let group: Vec<&CellRecord> = chunk.iter().collect();
        let title = format!("RIS at ({}, {})", pos[0], pos[1]);
        files.push((format!("trajectories_ris{i}.svg"), overlay(&title, &group, |r| r.label.clone())?));
    }
    files.push(("ris_draws.csv".to_string(), draw_tab.finish()));
    files.push(("ris_link_power.csv".to_string(), power.finish()));
    files.push(("ris_summary.csv".to_string(), summary.finish()));
    write_all(out_dir, files.iter().map(|(n, t)| (n.as_str(), t.as_str())))?;
    Ok(records)
}

/// Runs each energy-budget multiplier and writes `path_length.csv` plus a
/// `trajectories.svg` overlay.
pub fn sweep_energy_budget(exp: &Experiment, out_dir: &Path, jobs: usize) -> Result<Vec<CellRecord>> {
    exp.sweep.validate()?;
    let cells: Vec<Cell> = exp
        .sweep
        .multipliers
        .iter()
        .map(|&m| {
            let mut s = exp.loaded.scenario.clone();
            s.energy_budget_multiplier = m;
            Cell { label: format!("m{m}"), scenario: s }
        })
        .collect();
    let records = run_cells(exp, &cells, out_dir, jobs)?;
    let mut tab = Table::new(["multiplier", "path_length_m", "energy_J", "energy_budget_J", "status"]);
    for r in &records {
        tab.row([
            num(r.scenario.energy_budget_multiplier),
            num(r.path_length),
            num(r.energy),
            num(r.energy_budget),
            status_field(r),
        ]);
    }
    let group: Vec<&CellRecord> = records.iter().collect();
    let svg = if group.is_empty() {
        None
    } else {
        Some(overlay("Trajectories by energy budget", &group, |r| format!("{} x E_min", r.scenario.energy_budget_multiplier))?)
    };
    output::create_dir(out_dir)?;
    write_atomic(&out_dir.join("path_length.csv"), &tab.finish())?;
    if let Some(svg) = svg {
        write_atomic(&out_dir.join("trajectories.svg"), &svg)?;
    }
    Ok(records)
}
