//! Threshold constants for k = 3..6 and core fractions above the core threshold.

use xorsat_lab::thresholds::{core_sizes, lambda_of, s_k, ThresholdReport};

fn main() -> xorsat_lab::Result<()> {
    println!("{:>2} {:>10} {:>10} {:>10} {:>10}", "k", "lambda(k)", "alpha_k", "c_hat", "c_star");
    for k in 3..=6 {
        let r = ThresholdReport::new(k, None)?;
        println!("{k:>2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", r.mu_star, r.alpha_k, r.c_hat, r.c_star);
    }
    println!("lambda_of(3.6) = {:.6}", lambda_of(3.6)?);
    println!("s_4(0.2743) = {:.4e}", s_k(4, 0.2743)?);
    for c in [0.8, 0.85, 0.9, 0.95] {
        let (v, e) = core_sizes(3, c)?;
        println!("k=3 c={c}: core N/n = {v:.5}, M/n = {e:.5}");
    }
    println!("{}", serde_json::to_string_pretty(&ThresholdReport::new(4, Some(0.95))?)?);
    Ok(())
}
