//! H_k(alpha, zeta; c) against alpha for k = 4, written as CSV and SVG.

use xorsat_lab::lab::plot::{h_k_chart, h_k_csv, h_k_series};
use xorsat_lab::thresholds::alpha_k;

fn main() -> xorsat_lab::Result<()> {
    let cs = [0.51, 1.0, 1.1];
    let series = h_k_series(4, &cs, 0.005, 0.995, 198)?;
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("hk4.csv"), h_k_csv(&series)?)?;
    std::fs::write(dir.join("hk4.svg"), h_k_chart(4, &cs, 0.005, 0.995, 198)?.to_svg()?)?;
    println!("alpha_4 = {:.6}", alpha_k(4)?);
    for s in &series {
        let (a, worst) = s.points.iter().copied().fold((0.0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
        println!("{}: max H_4 = {worst:.5} at alpha = {a:.3}", s.name);
    }
    println!("wrote {}", dir.join("hk4.svg").display());
    Ok(())
}
