//! Empirical 2-core sizes against the limiting fractions, k = 3.

use xorsat_lab::instance::ModelTag;
use xorsat_lab::lab::{run_core_check, ExperimentConfig, ExperimentKind};

fn main() -> xorsat_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::CoreCheck,
        model: ModelTag::Unconstrained,
        k: 3,
        n: 20_000,
        c_grid: vec![0.7, 0.8, 0.85, 0.9, 0.95],
        trials: 10,
        seed: 5,
        ..ExperimentConfig::default()
    };
    let (rows, _) = run_core_check(&cfg)?;
    println!("{:>5} {:>9} {:>9} {:>9} {:>9} {:>6}", "c", "N/n", "pred", "M/N", "pred", "empty");
    for r in rows {
        println!(
            "{:>5} {:>9.5} {:>9.5} {:>9} {:>9} {:>6}",
            r.c,
            r.mean_vars_frac,
            r.predicted_vars_frac,
            r.mean_ratio.map_or("-".into(), |x| format!("{x:.5}")),
            r.predicted_ratio.map_or("-".into(), |x| format!("{x:.5}")),
            r.empty_cores
        );
    }
    Ok(())
}
