//! Interval enclosures of the functions used by the certificates.

use xorsat_lab::certify::{certified_lambda, interval_h_k, interval_s_k, psi_interval};
use xorsat_lab::interval::Interval;
use xorsat_lab::thresholds::ZetaChoice;

fn main() -> xorsat_lab::Result<()> {
    let x = Interval::new(0.3, 0.31)?;
    println!("exp({x}) = {}", x.exp());
    println!("ln({x}) = {}", x.ln());
    println!("f({x}) = {}", x.f());
    println!("psi([2.7694]) = {}", psi_interval(Interval::point(2.7694)));
    println!("lambda(3) in {}", certified_lambda(Interval::point(3.0))?);
    println!("s_4 on [0.2743] = {}", interval_s_k(4, Interval::point(0.2743))?);
    let h = interval_h_k(Interval::new(0.300, 0.301)?, ZetaChoice::new(0.360, 0.667), Interval::new(0.9995, 1.0)?, 3)?;
    println!("H_3 on [0.300, 0.301] x [0.9995, 1] = {h}");
    Ok(())
}
