//! Satisfiability of the constrained model around m = n, k = 4.

use std::time::Instant;

use xorsat_lab::instance::ModelTag;
use xorsat_lab::lab::{run_sat_sweep, ExperimentConfig, ExperimentKind};

fn main() -> xorsat_lab::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(1000);
    let trials = args.get(1).copied().unwrap_or(40) as u64;
    let cfg = ExperimentConfig {
        kind: ExperimentKind::SatSweep,
        model: ModelTag::Constrained,
        k: 4,
        n,
        m_list: vec![9 * n / 10, n, 11 * n / 10],
        trials,
        seed: 2024,
        ..ExperimentConfig::default()
    };
    let t = Instant::now();
    let (rows, _) = run_sat_sweep(&cfg)?;
    for r in &rows {
        println!(
            "m={:<5} sat {:>4}/{:<4} mean nullity {:.3}  ({:.1}s)",
            r.m, r.sat_count, r.trials, r.mean_nullity, r.wall_time
        );
    }
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
