//! Satisfiability of the constrained model at m = n ± w.

use xorsat_lab::instance::ModelTag;
use xorsat_lab::lab::{run_window_check, ExperimentConfig, ExperimentKind};

fn main() -> xorsat_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::WindowCheck,
        model: ModelTag::Constrained,
        k: 4,
        n: 400,
        windows: vec![2, 5, 10, 15],
        trials: 100,
        seed: 23,
        ..ExperimentConfig::default()
    };
    let (rows, _) = run_window_check(&cfg)?;
    for r in rows {
        println!(
            "w={:+3} m={:<4} sat {:.3} envelope {} monotone {}",
            r.offset,
            r.m,
            r.sat_fraction,
            r.envelope_gate.map_or("-".into(), |g| format!(">= {g:.5} (unsat {:.3})", r.unsat_fraction)),
            r.monotone
        );
    }
    Ok(())
}
