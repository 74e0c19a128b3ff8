//! Critical-set census of the constrained model, and the exact second-moment
//! identity on tiny instances.

use xorsat_lab::instance::{gen_constrained, ModelTag};
use xorsat_lab::lab::{exact_moment_ratio, run_critical_census, ExperimentConfig, ExperimentKind};
use xorsat_lab::rng::Seed;

fn main() -> xorsat_lab::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let trials = args.first().copied().unwrap_or(200) as u64;
    for n in args.get(1..).filter(|r| !r.is_empty()).map(|r| r.to_vec()).unwrap_or(vec![50, 100, 200]) {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::CriticalCensus,
            model: ModelTag::Constrained,
            k: 4,
            n,
            c_grid: vec![0.9],
            trials,
            seed: 11,
            ..ExperimentConfig::default()
        };
        let (rows, _) = run_critical_census(&cfg)?;
        let r = &rows[0];
        println!("k=4 n={:<5} m={:<5} mean X = {:.4}  P(X=0) = {:.3}", r.n, r.m, r.mean_x, r.zero_fraction);
    }

    let inst = gen_constrained(3, 4, 6, Seed::new(3, 0))?;
    let (ratio, total) = exact_moment_ratio(&inst)?;
    let x = xorsat_lab::gf2::count_critical_sets(&inst.matrix());
    println!("m=4 n=6: sum_b N(b) = {total}, E[N^2]/E[N]^2 = {ratio}, X + 1 = {}", x + 1u32);
    Ok(())
}
