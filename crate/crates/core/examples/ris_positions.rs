//! Moves the RIS between candidate positions under seeded random rate
//! requirements and compares how much each position's RIS link is used.
//!
//! `cargo run --release --example ris_positions -- [out_dir] [draws]`

use std::path::PathBuf;

use uav_ris_sca::experiments::{sweep_ris_positions, Experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| "out/ris_positions".into());
    let mut exp = Experiment::baseline();
    exp.sweep.draws = args.next().map(|d| d.parse()).transpose()?.unwrap_or(10);
    let cells = sweep_ris_positions(&exp, &out, 0)?;
    for (pos, chunk) in exp.sweep.ris_positions.iter().zip(cells.chunks(exp.sweep.draws)) {
        let ok: Vec<_> = chunk.iter().filter(|c| c.feasible()).collect();
        let mean = |f: fn(&&uav_ris_sca::experiments::CellRecord) -> f64| ok.iter().map(f).sum::<f64>() / ok.len().max(1) as f64;
        println!(
            "RIS at ({:>3}, {:>3}): {} feasible, mean LoS {:.3e} W, mean RIS {:.3e} W",
            pos[0],
            pos[1],
            ok.len(),
            mean(|c| c.avg_p_los),
            mean(|c| c.avg_p_ris)
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
