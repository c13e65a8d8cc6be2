//! End-to-end checks of the run and sweep writers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use uav_ris_sca::experiments::{
    parse_experiment, render_iterates_svg, run_scenario, sweep_energy_budget, sweep_users_rates, Experiment,
};
use uav_ris_sca::sca::ScaStatus;

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let body = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (head, body)
}

fn col(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

/// Every file under `dir`, keyed by relative path.
fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let key = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(key, fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn run_writes_consistent_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = run_scenario(&Experiment::baseline(), &out).unwrap();
    assert_eq!(r.status(), ScaStatus::Converged);

    let (head, body) = rows(&read(&out, "summary.csv"));
    assert_eq!(body.len(), 1);
    assert_eq!(body[0][col(&head, "status")], "converged");
    let p_total: f64 = body[0][col(&head, "P_total")].parse().unwrap();
    assert_eq!(p_total, r.p_total());

    let (_, power) = rows(&read(&out, "power.csv"));
    assert_eq!(power.len(), r.trajectory.z.len());
    let summed: f64 = power.iter().flat_map(|row| row[1..].iter().map(|v| v.parse::<f64>().unwrap())).sum();
    assert!((summed - p_total).abs() <= 1e-9 * p_total, "{summed} vs {p_total}");

    let (head, iters) = rows(&read(&out, "iterations.csv"));
    let hist: Vec<f64> = iters.iter().map(|row| row[col(&head, "p_total")].parse().unwrap()).collect();
    assert_eq!(hist.len(), r.state.p_total_history.len());
    for w in hist.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-6), "{hist:?}");
    }

    let (head, traj) = rows(&read(&out, "trajectory.csv"));
    assert_eq!(traj.len(), r.trajectory.z.len());
    assert!(traj.last().unwrap()[col(&head, "vx")].is_empty());

    let svg = render_iterates_svg(&read(&out, "iterates.csv"), &read(&out, "nodes.csv")).unwrap();
    assert_eq!(svg, read(&out, "trajectory.svg"));
    assert!(!out.with_extension("tmp").exists());
}

#[test]
fn unit_budget_keeps_the_straight_line() {
    let exp = parse_experiment("[scenario]\nenergy_budget_multiplier = 1.0\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let r = run_scenario(&exp, dir.path()).unwrap();
    let s = &exp.loaded.scenario;
    assert!(r.trajectory.max_deviation(s.uav_start, s.uav_end) <= 1e-6);
    let (head, body) = rows(&read(dir.path(), "trajectory.csv"));
    let n = body.len() - 1;
    for (i, row) in body.iter().enumerate() {
        let x: f64 = row[col(&head, "x")].parse().unwrap();
        let y: f64 = row[col(&head, "y")].parse().unwrap();
        let f = i as f64 / n as f64;
        let want = [s.uav_start[0] + f * (s.uav_end[0] - s.uav_start[0]), s.uav_start[1] + f * (s.uav_end[1] - s.uav_start[1])];
        assert!((x - want[0]).hypot(y - want[1]) <= 1e-6);
    }
}

const SMALL: &str = "\
[solver]
max_iterations = 4

[sweep]
ue_counts = [1, 4]
rates = [0.057, 0.557]
multipliers = [1.0, 1.3]
";

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let exp = parse_experiment(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut trees = Vec::new();
    for jobs in [1, 3] {
        let out = dir.path().join(format!("jobs{jobs}"));
        let users = sweep_users_rates(&exp, &out.join("users"), jobs).unwrap();
        assert_eq!(users.len(), 4);
        let energy = sweep_energy_budget(&exp, &out.join("energy"), jobs).unwrap();
        assert_eq!(energy.len(), 2);
        for c in &energy {
            assert!(c.energy <= c.energy_budget * (1.0 + 1e-6), "{}", c.label);
        }
        assert!(energy[1].path_length >= energy[0].path_length - 1e-6);
        trees.push(tree(&out));
    }
    assert!(trees[0].contains_key("users/total_power.csv"));
    assert!(trees[0].contains_key("energy/path_length.csv"));
    assert_eq!(trees[0].keys().collect::<Vec<_>>(), trees[1].keys().collect::<Vec<_>>());
    for (name, bytes) in &trees[0] {
        assert!(bytes == &trees[1][name], "{name} differs between thread counts");
    }
}

#[test]
fn user_sweep_records_placements_and_cell_powers() {
    let exp = parse_experiment(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cells = sweep_users_rates(&exp, dir.path(), 2).unwrap();
    let (head, body) = rows(&read(dir.path(), "ue_placements.csv"));
    assert!(head.iter().any(|h| h == "x") && head.iter().any(|h| h == "y"));
    assert_eq!(body.len(), 1 + 4);

    let (head, total) = rows(&read(dir.path(), "total_power.csv"));
    for (row, cell) in total.iter().zip(&cells) {
        let p: f64 = row[col(&head, "P_total")].parse().unwrap();
        assert_eq!(p, cell.p_total);
        let cell_dir = dir.path().join("cells").join(&cell.label);
        let (_, power) = rows(&read(&cell_dir, "power.csv"));
        let summed: f64 = power.iter().flat_map(|r| r[1..].iter().map(|v| v.parse::<f64>().unwrap())).sum();
        assert!((summed - p).abs() <= 1e-9 * p.max(1e-300), "{}", cell.label);
    }
    for k in [1, 4] {
        let mut by_rate: Vec<_> = cells.iter().filter(|c| c.scenario.num_ues() == k && c.feasible()).collect();
        by_rate.sort_by(|a, b| a.scenario.r_min[0].total_cmp(&b.scenario.r_min[0]));
        for w in by_rate.windows(2) {
            assert!(w[1].p_total >= w[0].p_total, "K={k}");
        }
    }
    assert!(dir.path().join("trajectories_K4.svg").exists());
}
