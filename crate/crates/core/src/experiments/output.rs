//! CSV rendering of a single optimization run and atomic file placement.

use std::path::{Path, PathBuf};

use crate::energy::propulsion_power;
use crate::error::{Error, Result};
use crate::sca::{JointResult, Trajectory};
use crate::scenario::{EnergyParams, ScenarioConfig};

/// In-memory CSV builder with a fixed header.
pub(crate) struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub(crate) fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory cannot fail");
        Self { writer }
    }

    pub(crate) fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory cannot fail");
    }

    pub(crate) fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("flushing to memory cannot fail");
        String::from_utf8(bytes).expect("fields are UTF-8")
    }
}

/// Shortest round-trip decimal form.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

/// Shortest round-trip scientific form, used for powers.
pub(crate) fn sci(v: f64) -> String {
    format!("{v:e}")
}

/// Every CSV of one run, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub trajectory: String,
    pub power: String,
    pub iterations: String,
    pub summary: String,
    pub iterates: String,
    pub nodes: String,
}

impl RunFiles {
    pub fn named(&self) -> [(&'static str, &str); 6] {
        [
            ("trajectory.csv", &self.trajectory),
            ("power.csv", &self.power),
            ("iterations.csv", &self.iterations),
            ("summary.csv", &self.summary),
            ("iterates.csv", &self.iterates),
            ("nodes.csv", &self.nodes),
        ]
    }
}

pub(crate) fn trajectory_csv(s: &ScenarioConfig, e: &EnergyParams, t: &Trajectory) -> String {
    let mut tab = Table::new(["n", "x", "y", "vx", "vy", "speed", "propulsion_W"]);
    for (n, z) in t.z.iter().enumerate() {
        let mut row = vec![n.to_string(), num(z[0]), num(z[1])];
        match t.v.get(n) {
            Some(v) => {
                let sp = v[0].hypot(v[1]);
                let p = propulsion_power(sp.max(s.pi_min), s.pi_min, e).unwrap_or(f64::NAN);
                row.extend([num(v[0]), num(v[1]), num(sp), num(p)]);
            }
            // the terminal waypoint has no outgoing slot
            None => row.extend(std::iter::repeat(String::new()).take(4)),
        }
        tab.row(row);
    }
    tab.finish()
}

fn power_csv(r: &JointResult, k: usize) -> String {
    let mut header = vec!["n".to_string(), "p_bs".to_string()];
    header.extend((1..=k).map(|i| format!("p_{i}_direct")));
    header.extend((1..=k).map(|i| format!("p_{i}_ris")));
    let mut tab = Table::new(header);
    for (n, slot) in r.powers.slots.iter().enumerate() {
        let mut row = vec![n.to_string(), sci(slot.bs)];
        row.extend(slot.direct.iter().map(|&p| sci(p)));
        row.extend(slot.ris.iter().map(|&p| sci(p)));
        tab.row(row);
    }
    tab.finish()
}

fn iterations_csv(r: &JointResult) -> String {
    let mut tab = Table::new(["j", "p_total", "violation"]);
    for t in &r.trace {
        tab.row([t.iteration.to_string(), sci(t.p_total), sci(t.max_violation)]);
    }
    tab.finish()
}

fn summary_csv(s: &ScenarioConfig, e: &EnergyParams, r: &JointResult) -> String {
    let mut tab = Table::new([
        "status",
        "P_total",
        "energy_J",
        "iterations",
        "energy_budget_J",
        "max_violation",
        "message",
    ]);
    let energy = r.trajectory.energy(s, e).unwrap_or(f64::NAN);
    let mut message: Vec<String> = r.message.iter().cloned().collect();
    message.extend(r.warnings.iter().cloned());
    tab.row([
        r.status().as_str().to_string(),
        sci(r.p_total()),
        num(energy),
        r.state.iteration.to_string(),
        num(r.energy_budget),
        sci(r.report.max_violation()),
        message.join("; "),
    ]);
    tab.finish()
}

fn iterates_csv(r: &JointResult) -> String {
    let mut tab = Table::new(["j", "n", "x", "y"]);
    for (j, t) in r.iterates.iter().enumerate() {
        for (n, z) in t.z.iter().enumerate() {
            tab.row([j.to_string(), n.to_string(), num(z[0]), num(z[1])]);
        }
    }
    tab.finish()
}

/// Fixed network nodes: BS, RIS, UEs and the UAV endpoints.
pub(crate) fn nodes_csv(s: &ScenarioConfig) -> String {
    let mut tab = Table::new(["kind", "index", "x", "y"]);
    let mut put = |kind: &str, i: usize, p: [f64; 2]| tab.row([kind.to_string(), i.to_string(), num(p[0]), num(p[1])]);
    put("bs", 0, s.bs_position);
    put("ris", 0, s.ris_position);
    for (k, &p) in s.ue_positions.iter().enumerate() {
        put("ue", k + 1, p);
    }
    put("start", 0, s.uav_start);
    put("end", 0, s.uav_end);
    tab.finish()
}

pub fn run_files(s: &ScenarioConfig, e: &EnergyParams, r: &JointResult) -> RunFiles {
    RunFiles {
        trajectory: trajectory_csv(s, e, &r.trajectory),
        power: power_csv(r, s.num_ues()),
        iterations: iterations_csv(r),
        summary: summary_csv(s, e, r),
        iterates: iterates_csv(r),
        nodes: nodes_csv(s),
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io(dir))
}

/// Writes through a sibling temporary file and renames it into place.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io(path))
}

/// Writes a set of files into `dir`, creating it first.
pub(crate) fn write_all<'a>(dir: &Path, files: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
    create_dir(dir)?;
    for (name, text) in files {
        write_atomic(&dir.join(name), text)?;
    }
    Ok(())
}
