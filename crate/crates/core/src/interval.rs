//! Outward-rounded interval arithmetic.
//!
//! Every operation computes its endpoints in round-to-nearest and then widens
//! each by two ulps. Library `exp`/`ln`/`expm1`/`ln_1p` are accurate to well
//! under one ulp, so the widened result encloses the exact image.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const ULPS: usize = 2;

fn down(mut x: f64) -> f64 {
    for _ in 0..ULPS {
        x = x.next_down();
    }
    x
}

fn up(mut x: f64) -> f64 {
    for _ in 0..ULPS {
        x = x.next_up();
    }
    x
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`; `x` is taken as exact.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    fn widened(lo: f64, hi: f64) -> Self {
        Self { lo: down(lo), hi: up(hi) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Self { lo: self.lo, hi: m }, Self { lo: m, hi: self.hi })
    }

    /// Raises the lower end to `floor` when the true range is known to lie above it.
    pub fn clamp_below(self, floor: f64) -> Interval {
        Self {
            lo: self.lo.max(floor),
            hi: self.hi.max(floor),
        }
    }

    pub fn sqr(self) -> Interval {
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        if self.contains_zero() {
            Self {
                lo: 0.0,
                hi: up(a.max(b)),
            }
        } else {
            Self::widened(a.min(b), a.max(b)).clamp_below(0.0)
        }
    }

    pub fn powi(self, n: u32) -> Interval {
        (0..n).fold(Interval::point(1.0), |acc, _| acc * self)
    }

    pub fn exp(self) -> Interval {
        Self::widened(self.lo.exp(), self.hi.exp()).clamp_below(0.0)
    }

    pub fn expm1(self) -> Interval {
        Self::widened(self.lo.exp_m1(), self.hi.exp_m1())
    }

    /// Natural log; the part of the interval at or below zero maps to `-∞`.
    pub fn ln(self) -> Interval {
        let lo = if self.lo > 0.0 { down(self.lo.ln()) } else { f64::NEG_INFINITY };
        let hi = if self.hi > 0.0 { up(self.hi.ln()) } else { f64::NEG_INFINITY };
        Self { lo, hi }
    }

    pub fn ln_1p(self) -> Interval {
        let lo = if self.lo > -1.0 { down(self.lo.ln_1p()) } else { f64::NEG_INFINITY };
        let hi = if self.hi > -1.0 { up(self.hi.ln_1p()) } else { f64::NEG_INFINITY };
        Self { lo, hi }
    }

    pub fn cosh(self) -> Interval {
        let (a, b) = (self.lo.cosh(), self.hi.cosh());
        if self.contains_zero() {
            Self {
                lo: 1.0,
                hi: up(a.max(b)),
            }
        } else {
            Self::widened(a.min(b), a.max(b))
        }
    }

    /// `x ln x` with `0 ln 0 = 0`, for `x ⊂ [0, ∞)`.
    pub fn xlnx(self) -> Interval {
        if self.hi == 0.0 {
            return Interval::point(0.0);
        }
        if self.lo > 0.0 {
            return self * self.ln();
        }
        // On [0, hi]: x ln x ∈ [-1/e, max(0, hi ln hi)].
        let top = Interval::point(self.hi).xlnx().hi.max(0.0);
        Self {
            lo: down(-(-1f64).exp()),
            hi: top,
        }
    }

    /// `f(x) = e^x - 1 - x`.
    pub fn f(self) -> Interval {
        // f is convex with minimum 0 at x = 0.
        let (vlo, elo) = f_point(self.lo);
        let (vhi, ehi) = f_point(self.hi);
        let top = up((vlo + elo).max(vhi + ehi));
        let bottom = if self.contains_zero() {
            0.0
        } else if self.lo > 0.0 {
            down(vlo - elo)
        } else {
            down(vhi - ehi)
        };
        Self {
            lo: bottom.max(0.0),
            hi: top,
        }
    }

    /// `ln(1+u)/u` (equal to 1 at `u = 0`), decreasing on `u ≥ 0`.
    pub fn ln_1p_over(self) -> Interval {
        assert!(self.lo >= 0.0, "ln_1p_over needs u >= 0");
        let g = |u: f64| -> (f64, f64) {
            if u == 0.0 {
                (1.0, 0.0)
            } else if u < 1e-4 {
                // 1 - u/2 + u²/3 - …, alternating with decreasing terms.
                let v = 1.0 - u / 2.0 + u * u / 3.0;
                (v, u * u * u / 4.0 + 4.0 * f64::EPSILON)
            } else {
                let v = u.ln_1p() / u;
                (v, 4.0 * f64::EPSILON * v)
            }
        };
        let (vhi_u, ehi_u) = g(self.hi);
        let (vlo_u, elo_u) = g(self.lo);
        Self {
            lo: down(vhi_u - ehi_u).max(0.0),
            hi: up(vlo_u + elo_u).min(1.0),
        }
    }
}

/// Point value of `f` with an absolute error bound.
fn f_point(x: f64) -> (f64, f64) {
    if x.abs() < 0.5 {
        let v = crate::thresholds::f(x);
        // Twenty series terms: truncation below 1e-25 relative, rounding at
        // most ~40 ulps of a sum bounded below by 0.41.
        (v, v.abs() * 1e-14 + f64::MIN_POSITIVE)
    } else {
        let e = x.exp_m1();
        (e - x, (e.abs() + x.abs()) * 8.0 * f64::EPSILON)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::widened(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::widened(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if p.iter().any(|x| x.is_nan()) {
            return Interval::ENTIRE;
        }
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::widened(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.contains_zero() {
            return Interval::ENTIRE;
        }
        let p = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::widened(lo, hi)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, o: f64) -> Interval {
        self - Interval::point(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell(a: f64, b: f64) -> Interval {
        Interval::new(a.min(b), a.max(b)).unwrap()
    }

    #[test]
    fn basics() {
        let a = Interval::new(1.0, 2.0).unwrap();
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!((a + a).contains(4.0));
        assert!((a - a).contains(0.0));
        assert!((a * -a).contains(-4.0));
        assert_eq!(a / Interval::new(-1.0, 1.0).unwrap(), Interval::ENTIRE);
        assert!(Interval::point(0.0).f().lo == 0.0);
        assert!(Interval::new(-1.0, 2.0).unwrap().sqr().lo == 0.0);
        assert!(Interval::new(-1.0, 2.0).unwrap().cosh().lo == 1.0);
        assert_eq!(Interval::point(0.0).xlnx(), Interval::point(0.0));
        let (l, r) = a.bisect();
        assert_eq!(l.hi, r.lo);
        assert_eq!(Interval::point(0.0).ln_1p_over().hi, 1.0);
    }

    #[test]
    fn point_ops_enclose_exactly_representable_results() {
        let x = Interval::point(0.1);
        let s = x + x + x;
        assert!(s.contains(0.30000000000000004) && s.contains(0.3));
        assert!(Interval::point(1.0).exp().contains(std::f64::consts::E));
        assert!(Interval::point(2.0).ln().contains(std::f64::consts::LN_2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn enclosure(a in -8.0f64..8.0, b in -8.0f64..8.0, t in 0.0f64..1.0, c in -8.0f64..8.0, d in -8.0f64..8.0, s in 0.0f64..1.0) {
            let x = cell(a, b);
            let y = cell(c, d);
            let px = x.lo + t * (x.hi - x.lo);
            let py = y.lo + s * (y.hi - y.lo);
            prop_assert!((x + y).contains(px + py));
            prop_assert!((x - y).contains(px - py));
            prop_assert!((x * y).contains(px * py));
            if !y.contains_zero() {
                prop_assert!((x / y).contains(px / py));
            }
            prop_assert!(x.exp().contains(px.exp()));
            prop_assert!(x.expm1().contains(px.exp_m1()));
            prop_assert!(x.sqr().contains(px * px));
            prop_assert!(x.cosh().contains(px.cosh()));
            prop_assert!(x.f().contains(crate::thresholds::f(px)));
            prop_assert!(x.powi(3).contains(px * px * px));
            let pos = cell(a.abs() + 1e-3, b.abs() + 1e-3);
            let ppos = pos.lo + t * (pos.hi - pos.lo);
            prop_assert!(pos.ln().contains(ppos.ln()));
            prop_assert!(pos.ln_1p().contains(ppos.ln_1p()));
            prop_assert!(pos.ln_1p_over().contains(ppos.ln_1p() / ppos));
            let unit = cell(a.abs() / 8.0, b.abs() / 8.0);
            let pu = unit.lo + t * (unit.hi - unit.lo);
            let xl = if pu == 0.0 { 0.0 } else { pu * pu.ln() };
            prop_assert!(unit.xlnx().contains(xl));
        }
    }
}
