//! Exact E[Y^(l)] on a tiny chip model against the exponential bound.

use xorsat_lab::thresholds::{bound_ey, exact_ey, rational_ln, rigorous_log_bound_ey, zeta_choice};

fn main() -> xorsat_lab::Result<()> {
    let (k, m, n) = (3, 8, 10);
    let c = m as f64 / n as f64;
    for ell in 1..=m {
        let exact = exact_ey(k, m, n, ell)?;
        let alpha = ell as f64 / m as f64;
        let z = zeta_choice(k, c.max(0.7), alpha.min(0.99))?;
        println!(
            "l={ell}: ln E[Y] = {:>9.4}  Chernoff bound {:>9.4}  exponential part {:>9.4}",
            rational_ln(&exact),
            rigorous_log_bound_ey(k, m, n, ell, z)?,
            bound_ey(k, c, n, ell, z)?
        );
    }
    Ok(())
}
