//! Satisfiability sweep of the unconstrained model across c_3*, with an SVG chart.

use xorsat_lab::instance::ModelTag;
use xorsat_lab::lab::plot::emit_plot;
use xorsat_lab::lab::{run_experiment, ExperimentConfig, ExperimentKind};
use xorsat_lab::thresholds::c_star;

fn main() -> xorsat_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::SatSweep,
        model: ModelTag::Unconstrained,
        k: 3,
        n: 1000,
        c_grid: vec![0.85, 0.88, 0.9, 0.92, 0.94, 0.97, 1.0],
        trials: 60,
        seed: 3,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..ExperimentConfig::default()
    };
    println!("c_3* = {:.5}", c_star(3)?);
    let out = run_experiment(&cfg)?;
    print!("{}", out.csv()?);
    let stem = std::env::temp_dir().join("xorsat-lab-sweep");
    let [csv, _, _] = out.write(&stem)?;
    let svg = stem.with_extension("svg");
    emit_plot(&csv, &svg)?;
    println!("chart: {}", svg.display());
    Ok(())
}
