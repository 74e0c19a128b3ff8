//! Builds every interval certificate, replays it, and prints a summary line.

use std::time::Instant;

use xorsat_lab::certify::{
    certify_alarge_constants, certify_amed, certify_amed_induction, certify_k3_grid, certify_monotonicity, replay,
    Certificate,
};
use xorsat_lab::interval::Interval;

fn report(name: &str, build: impl FnOnce() -> xorsat_lab::Result<Certificate>) -> xorsat_lab::Result<()> {
    let t = Instant::now();
    let cert = build()?;
    let again = replay(&cert)?;
    println!(
        "{name:<18} cells={:<6} global={:<24} worst_margin={:<12.3e} verified={} replay={} ({:.1}s)",
        cert.cells.len(),
        format!("{:?}", cert.global_bound),
        cert.worst_margin,
        cert.verified,
        again.verified,
        t.elapsed().as_secs_f64()
    );
    if let Some(f) = &cert.failure {
        println!("  failure: {f}");
    }
    Ok(())
}

fn main() -> xorsat_lab::Result<()> {
    report("amed k=4", || certify_amed(4, -1e-5))?;
    report("amed k=5", || certify_amed(5, -0.005))?;
    report("amed k=6", || certify_amed(6, -0.03))?;
    report("amed induction", certify_amed_induction)?;
    report("alarge constants", certify_alarge_constants)?;
    report("monotonicity", certify_monotonicity)?;
    report("k3 grid", || certify_k3_grid(Interval::new(0.999, 1.001)?))?;
    Ok(())
}
