//! Scalar formulas for the XORSAT phase transition.
//!
//! The building block is `f(x) = e^x - 1 - x`, the exponential generating
//! function of "at least two". Everything else (the tilt `λ = ψ⁻¹(d)`, the
//! truncated-Poisson variance, the collision rate `γ`, the critical-set
//! exponent `H_k`, the core-density function `g_k`) is expressed through it.
//!
//! All evaluations are in `f64`. Near zero `f`, `ψ` and `Var Z` switch to
//! series branches so no quantity degrades to `0/0`.

pub(crate) mod series;

pub use series::{bound_ey, exact_a, exact_b, exact_ey, rational_ln, rigorous_log_bound_ey};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Below this magnitude `f`, `f'` and `ψ` use truncated Taylor series.
const SERIES_CUTOFF: f64 = 0.5;
/// Enough terms for full double precision on `|x| < SERIES_CUTOFF`.
const SERIES_TERMS: usize = 20;

/// Absolute tolerance on `x` for all bisection roots.
pub const ROOT_TOL: f64 = 1e-12;

/// `f(x) = e^x - 1 - x`, valid for any real `x`.
pub fn f(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        x * x * f_over_x2_series(x)
    } else {
        x.exp_m1() - x
    }
}

/// `f'(x) = e^x - 1`.
pub fn f_prime(x: f64) -> f64 {
    x.exp_m1()
}

/// `f(x) / x^2 = Σ_{j≥0} x^j / (j+2)!`.
fn f_over_x2_series(x: f64) -> f64 {
    let mut term = 0.5;
    let mut sum = 0.0;
    for j in 0..SERIES_TERMS {
        sum += term;
        term *= x / (j + 3) as f64;
    }
    sum
}

/// `f'(x) / x = Σ_{j≥0} x^j / (j+1)!`.
fn fprime_over_x_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..SERIES_TERMS {
        sum += term;
        term *= x / (j + 2) as f64;
    }
    sum
}

/// `ψ(x) = x f'(x) / f(x)`, with `ψ(0) = 2`. Strictly increasing on `[0, ∞)`.
pub fn psi(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid(format!("psi needs x >= 0, got {x}")));
    }
    Ok(psi_unchecked(x))
}

pub(crate) fn psi_unchecked(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        fprime_over_x_series(x) / f_over_x2_series(x)
    } else {
        // x (1 - e^-x) / (1 - e^-x (1 + x)), overflow-free.
        let e = (-x).exp();
        x * (-(-x).exp_m1()) / (1.0 - e * (1.0 + x))
    }
}

/// `λ(d) = ψ⁻¹(d)`: the unique positive root of `ψ(x) = d`, for `d > 2`.
pub fn lambda_of(d: f64) -> Result<f64> {
    if !(d > 2.0) || !d.is_finite() {
        return Err(invalid(format!("lambda_of needs d > 2, got {d}")));
    }
    let mut hi = 1.0;
    while psi_unchecked(hi) <= d {
        hi *= 2.0;
    }
    let mut lo = if psi_unchecked(1e-9) < d { 1e-9 } else { 0.0 };
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi_unchecked(mid) < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Variance of the truncated Poisson `Z(λ)` (Poisson conditioned on `≥ 2`).
pub fn var_z(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("var_z needs lambda > 0, got {lambda}")));
    }
    if lambda < 1.0 {
        // Two-pass moments over the pmf; no cancellation between O(1) terms.
        let mut w = Vec::with_capacity(32);
        let mut t = 1.0;
        for j in 2..34usize {
            if j > 2 {
                t *= lambda / j as f64;
            } else {
                t = 0.5;
            }
            w.push((j as f64, t));
        }
        let total: f64 = w.iter().map(|p| p.1).sum();
        let mean: f64 = w.iter().map(|(j, p)| j * p).sum::<f64>() / total;
        let var: f64 = w.iter().map(|(j, p)| (j - mean).powi(2) * p).sum::<f64>() / total;
        return Ok(var);
    }
    let e = (-lambda).exp();
    let denom = 1.0 - e * (1.0 + lambda);
    let second = lambda * lambda / denom;
    let p = psi_unchecked(lambda);
    Ok(second + p - p * p)
}

/// Mean of `Z(λ)`, which equals `ψ(λ)`.
pub fn mean_z(lambda: f64) -> Result<f64> {
    psi(lambda)
}

/// Limiting mean number of chip collisions: `γ = (k-1)/2 · λ e^λ / (e^λ - 1)`.
pub fn gamma(k: usize, lambda: f64) -> Result<f64> {
    if k < 3 {
        return Err(invalid(format!("gamma needs k >= 3, got {k}")));
    }
    if !(lambda > 0.0) {
        return Err(invalid(format!("gamma needs lambda > 0, got {lambda}")));
    }
    Ok((k as f64 - 1.0) / 2.0 * lambda / -(-lambda).exp_m1())
}

/// `α_k = e · k^{-k/(k-2)}`.
pub fn alpha_k(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(invalid(format!("alpha_k needs k >= 3, got {k}")));
    }
    let k = k as f64;
    Ok(std::f64::consts::E * k.powf(-k / (k - 2.0)))
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Natural-log binary entropy `H(α)`, with `0 ln 0 = 0`.
pub fn entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("entropy needs alpha in [0,1], got {alpha}")));
    }
    Ok(-xlnx(alpha) - xlnx(1.0 - alpha))
}

/// A pair of saddle-point scalings `(ζ₁, ζ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaChoice {
    pub zeta1: f64,
    pub zeta2: f64,
}

impl ZetaChoice {
    pub const fn new(zeta1: f64, zeta2: f64) -> Self {
        Self { zeta1, zeta2 }
    }

    pub fn swapped(self) -> Self {
        Self::new(self.zeta2, self.zeta1)
    }
}

/// `ln[(f(λ(ζ₂+ζ₁)) + f(λ(ζ₂-ζ₁))) / (2 f(λ))]`.
pub(crate) fn log_parity_ratio(lambda: f64, z: ZetaChoice) -> f64 {
    let num = f(lambda * (z.zeta2 + z.zeta1)) + f(lambda * (z.zeta2 - z.zeta1));
    (num / (2.0 * f(lambda))).ln()
}

fn check_hk_domain(alpha: f64, z: ZetaChoice, c: f64, k: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("H_k needs alpha in [0,1], got {alpha}")));
    }
    if !(z.zeta1 > 0.0 && z.zeta2 > 0.0) {
        return Err(invalid(format!("H_k needs zeta > 0, got {z:?}")));
    }
    if !(c * k as f64 > 2.0) {
        return Err(invalid(format!("H_k needs ck > 2, got c={c}, k={k}")));
    }
    Ok(())
}

/// Exponential rate `H_k(α, ζ; c)` bounding the expected number of critical
/// row sets with `α m` rows in the chip model.
pub fn h_k(alpha: f64, zeta: ZetaChoice, c: f64, k: usize) -> Result<f64> {
    check_hk_domain(alpha, zeta, c, k)?;
    let lambda = lambda_of(c * k as f64)?;
    Ok(h_k_at(alpha, zeta, c, k, lambda))
}

/// `H_k` with a precomputed `λ = λ(ck)`; no domain checks.
pub fn h_k_at(alpha: f64, zeta: ZetaChoice, c: f64, k: usize, lambda: f64) -> f64 {
    let ck = c * k as f64;
    let abar = 1.0 - alpha;
    let a_term = if alpha == 0.0 { 0.0 } else { alpha * (alpha / zeta.zeta1).ln() };
    let b_term = if abar == 0.0 { 0.0 } else { abar * (abar / zeta.zeta2).ln() };
    c * (-xlnx(alpha) - xlnx(abar)) + ck * a_term + ck * b_term + log_parity_ratio(lambda, zeta)
}

/// `H_k` at `ζ = (α, 1-α)` in its reduced form `cH(α) + ln(½ + ½ f(λ(1-2α))/f(λ))`.
pub fn h_k_symmetric(alpha: f64, c: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("alpha must be in [0,1], got {alpha}")));
    }
    let lambda = lambda_of(c * k as f64)?;
    let ratio = f(lambda * (1.0 - 2.0 * alpha)) / f(lambda);
    Ok(c * entropy(alpha)? + (0.5 + 0.5 * ratio).ln())
}

/// `s_k(α) = H(α) + ln(½ + ½ e^{-2kα})`.
pub fn s_k(k: usize, alpha: f64) -> Result<f64> {
    Ok(entropy(alpha)? + (0.5 + 0.5 * (-2.0 * k as f64 * alpha).exp()).ln())
}

/// `R(λ, x) = f(λx) / (x² f(λ))` for `x ∈ (0, 1]`.
pub fn r_ratio(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("R needs lambda > 0, got {lambda}")));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(invalid(format!("R needs x in (0,1], use r0 at x=0; got {x}")));
    }
    Ok(f(lambda * x) / (x * x * f(lambda)))
}

/// `lim_{x→0⁺} R(λ, x) = λ² / (2 f(λ))`.
pub fn r0(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("R0 needs lambda > 0, got {lambda}")));
    }
    Ok(lambda * lambda / (2.0 * f(lambda)))
}

/// Core-density function `g_k(x) = x / (k (1 - e^{-x})^{k-1})`.
pub fn g_k(k: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("g_k needs x > 0, got {x}")));
    }
    Ok(g_k_unchecked(k, x))
}

fn g_k_unchecked(k: usize, x: f64) -> f64 {
    x / (k as f64 * (-(-x).exp_m1()).powi(k as i32 - 1))
}

/// Location and value of the minimum of the convex function `g_k` on `(0, ∞)`.
pub fn g_k_minimum(k: usize) -> Result<(f64, f64)> {
    if k < 3 {
        return Err(invalid(format!("g_k minimum needs k >= 3, got {k}")));
    }
    // Bracket: g_k blows up at 0 and grows linearly at infinity.
    let mut hi = 1.0;
    while g_k_unchecked(k, 2.0 * hi) < g_k_unchecked(k, hi) {
        hi *= 2.0;
    }
    let (mut a, mut b) = (1e-6, 2.0 * hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut g1, mut g2) = (g_k_unchecked(k, x1), g_k_unchecked(k, x2));
    while b - a > ROOT_TOL {
        if g1 < g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g_k_unchecked(k, x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g_k_unchecked(k, x2);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, g_k_unchecked(k, x)))
}

/// 2-core emergence threshold `ĉ = min g_k`.
pub fn c_hat(k: usize) -> Result<f64> {
    Ok(g_k_minimum(k)?.1)
}

/// Larger solution `μ` of `g_k(μ) = c`; `None` when `c < ĉ` (no 2-core).
pub fn mu_of(k: usize, c: f64) -> Result<Option<f64>> {
    let (argmin, min) = g_k_minimum(k)?;
    if c < min {
        return Ok(None);
    }
    let mut hi = 2.0 * argmin;
    while g_k_unchecked(k, hi) < c {
        hi *= 2.0;
    }
    let mut lo = argmin;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g_k_unchecked(k, mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Satisfiability threshold of unconstrained k-XORSAT, `c_k* = g_k(λ(k))`.
pub fn c_star(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(invalid(format!("c_star needs k >= 3, got {k}")));
    }
    g_k(k, lambda_of(k as f64)?)
}

/// Leading-order fractions `(N/n, M/n)` of the 2-core; `(0, 0)` below `ĉ`.
pub fn core_sizes(k: usize, c: f64) -> Result<(f64, f64)> {
    Ok(match mu_of(k, c)? {
        None => (0.0, 0.0),
        Some(mu) => core_sizes_at_mu(k, mu),
    })
}

fn core_sizes_at_mu(k: usize, mu: f64) -> (f64, f64) {
    let em = (-mu).exp();
    let vars = 1.0 - em * (1.0 + mu);
    let eqs = mu * (1.0 - em) / k as f64;
    (vars, eqs)
}

/// Default `δ` used near `α = 1` by [`zeta_choice`].
pub const DEFAULT_DELTA: f64 = 0.05;

/// Piecewise `ζ(α)` for which `H_k(α, ζ; c)` is provably negative when `c < 1`.
pub fn zeta_choice(k: usize, c: f64, alpha: f64) -> Result<ZetaChoice> {
    zeta_choice_with_delta(k, c, alpha, DEFAULT_DELTA)
}

pub fn zeta_choice_with_delta(k: usize, c: f64, alpha: f64, delta: f64) -> Result<ZetaChoice> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("zeta_choice needs alpha in (0,1), got {alpha}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must be in (0, 1/2), got {delta}")));
    }
    let ak = alpha_k(k)?;
    Ok(if alpha <= 0.99 * ak {
        ZetaChoice::new((alpha / (c * k as f64)).sqrt(), 1.0 - alpha)
    } else if alpha <= 0.5 {
        ZetaChoice::new(alpha, 1.0 - alpha)
    } else if alpha < 1.0 - delta {
        zeta_choice_with_delta(k, c, 1.0 - alpha, delta)?.swapped()
    } else {
        ZetaChoice::new(1.0 - delta, delta)
    })
}

/// Every scalar prediction for a given `(k, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub k: usize,
    pub c: Option<f64>,
    /// `ψ⁻¹(ck)`; present when `c` is given.
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha_k: f64,
    pub c_hat: f64,
    /// Larger root of `g_k(μ) = c`; absent below `ĉ` or without `c`.
    pub mu: Option<f64>,
    /// `λ(k)`, the core tilt at which the core density reaches one.
    pub mu_star: f64,
    pub c_star: f64,
    pub core_frac_vars: Option<f64>,
    pub core_frac_eqs: Option<f64>,
}

impl ThresholdReport {
    pub fn new(k: usize, c: Option<f64>) -> Result<Self> {
        if k < 3 {
            return Err(invalid(format!("k must be >= 3, got {k}")));
        }
        let mu_star = lambda_of(k as f64)?;
        let mut report = Self {
            k,
            c,
            lambda: None,
            gamma: None,
            alpha_k: alpha_k(k)?,
            c_hat: c_hat(k)?,
            mu: None,
            mu_star,
            c_star: g_k(k, mu_star)?,
            core_frac_vars: None,
            core_frac_eqs: None,
        };
        if let Some(c) = c {
            if !(c > 0.0) {
                return Err(invalid(format!("c must be positive, got {c}")));
            }
            if c * k as f64 > 2.0 {
                let lambda = lambda_of(c * k as f64)?;
                report.lambda = Some(lambda);
                report.gamma = Some(gamma(k, lambda)?);
            }
            report.mu = mu_of(k, c)?;
            let (v, e) = core_sizes(k, c)?;
            report.core_frac_vars = Some(v);
            report.core_frac_eqs = Some(e);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newton_lambda(d: f64) -> f64 {
        // Independent route: Newton on ψ(x) - d with a numeric derivative.
        let mut x = d;
        for _ in 0..100 {
            let h = 1e-6 * x.max(1.0);
            let fx = psi_unchecked(x) - d;
            let dfx = (psi_unchecked(x + h) - psi_unchecked(x - h)) / (2.0 * h);
            let step = fx / dfx;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        x
    }

    #[test]
    fn f_values() {
        assert_eq!(f(0.0), 0.0);
        assert_eq!(f_prime(0.0), 0.0);
        assert!((f(1.0) - 0.718_281_828_459_045).abs() < 1e-15);
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert!(f(x) > f(-x));
        }
        // Series and closed form agree around the branch point.
        for x in [0.49f64, -0.49, 0.3, -0.2] {
            let closed = x.exp_m1() - x;
            assert!((f(x) - closed).abs() < 1e-15 * closed.abs().max(1e-3));
        }
        assert!((f(1e-8) - (5e-17 + 1e-24 / 6.0)).abs() < 1e-31);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0).unwrap(), 2.0);
        assert!(psi(2.149).unwrap() < 3.0);
        assert!(psi(2.7694).unwrap() <= 3.3992);
        assert!(psi(-1.0).is_err());
        // Near zero ψ ≈ 2 + x/3.
        assert!((psi(1e-6).unwrap() - (2.0 + 1e-6 / 3.0)).abs() < 1e-12);
        // Branch continuity.
        let a = psi(SERIES_CUTOFF - 1e-12).unwrap();
        let b = psi(SERIES_CUTOFF + 1e-12).unwrap();
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn psi_strictly_increasing() {
        let mut prev = psi(0.0).unwrap();
        for i in 1..=50_000 {
            let x = i as f64 * 1e-3;
            let p = psi(x).unwrap();
            assert!(p > prev, "psi not increasing at {x}");
            prev = p;
        }
    }

    #[test]
    fn lambda_values() {
        let l3 = lambda_of(3.0).unwrap();
        assert!(l3 > 2.149 && l3 < 2.151, "{l3}");
        for d in [2.5, 3.0, 3.6, 4.0, 8.0] {
            let l = lambda_of(d).unwrap();
            assert!((psi(l).unwrap() - d).abs() < 1e-10 * d);
            assert!((l - newton_lambda(d)).abs() < 1e-9);
        }
        let l4 = lambda_of(4.0).unwrap();
        assert!((l4 - 3.594).abs() < 1e-3, "{l4}");
        assert!(lambda_of(2.0).is_err());
        assert!(lambda_of(1.5).is_err());
    }

    #[test]
    fn lambda_inverts_psi() {
        let mut x = 2.01;
        while x <= 40.0 {
            let d = psi(x).unwrap();
            assert!((lambda_of(d).unwrap() - x).abs() < 1e-10, "x={x}");
            x += 0.0137;
        }
    }

    #[test]
    fn var_z_bounds() {
        for l in [0.1, 1.0, 2.1491, 5.0, 10.0] {
            let v = var_z(l).unwrap();
            assert!(v >= l / 3.0 && v <= l, "lambda={l} var={v}");
        }
        // The exact ratio is 1 - 4.63e-19, which rounds to 1 in f64.
        let r = var_z(50.0).unwrap() / 50.0;
        assert!(r > 0.95 && r <= 1.0, "{r}");
        assert!(var_z(0.0).is_err());
        // Branch continuity at λ = 1.
        assert!((var_z(1.0 - 1e-12).unwrap() - var_z(1.0).unwrap()).abs() < 1e-10);
        // Small-λ limit Var ≈ λ/3.
        assert!((var_z(1e-6).unwrap() / 1e-6 - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn gamma_values() {
        let l = lambda_of(3.6).unwrap();
        assert!((l - 3.0568).abs() < 1e-3);
        let g = gamma(3, l).unwrap();
        assert!((g - 3.2077).abs() < 1e-3, "{g}");
        let mut prev = 0.0;
        for i in 1..1000 {
            let v = gamma(3, i as f64 * 0.01).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!((gamma(3, 1e-9).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn alpha_k_values() {
        assert!(0.99 * alpha_k(4).unwrap() > 0.1681);
        assert!(0.99 * alpha_k(5).unwrap() > 0.1840);
        for k in 4..=64 {
            assert!(alpha_k(k).unwrap() < 0.2);
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert!((entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(entropy(1.5).is_err());
        for x in [0.1, 0.2, 0.4514, 0.9] {
            let h = entropy(0.5 - x / 2.0).unwrap();
            assert!(h <= (4.0 / (x * x + 2.0)).ln());
        }
    }

    #[test]
    fn h_k_forms_agree() {
        let (k, c, a) = (4, 1.0, 0.3);
        let full = h_k(a, ZetaChoice::new(a, 1.0 - a), c, k).unwrap();
        let simple = h_k_symmetric(a, c, k).unwrap();
        assert!((full - simple).abs() < 1e-12);
        for &(k, c) in &[(3, 0.9), (5, 0.7), (4, 1.1)] {
            for i in 1..50 {
                let a = i as f64 / 100.0;
                let full = h_k(a, ZetaChoice::new(a, 1.0 - a), c, k).unwrap();
                let simple = h_k_symmetric(a, c, k).unwrap();
                assert!((full - simple).abs() < 1e-12, "k={k} c={c} a={a}");
            }
        }
    }

    #[test]
    fn h_k_k3_grid_point() {
        let v = h_k(0.3, ZetaChoice::new(0.360, 0.667), 1.0, 3).unwrap();
        assert!(v < -0.002, "{v}");
    }

    #[test]
    fn h_k_small_alpha_bound() {
        let (k, c) = (4, 1.0);
        let ak = alpha_k(k).unwrap();
        let z = ZetaChoice::new((ak / (c * k as f64)).sqrt(), 1.0 - ak);
        let v = h_k(ak, z, c, k).unwrap();
        assert!(v <= 1e-15, "{v}");
        // The bound (cα)(k/2-1)ln(α/α_k) holds below α_k as well.
        for i in 1..100 {
            let a = ak * i as f64 / 100.0;
            let z = zeta_choice(k, c, a).unwrap();
            let bound = c * a * (k as f64 / 2.0 - 1.0) * (a / ak).ln();
            if a <= 0.99 * ak {
                assert!(h_k(a, z, c, k).unwrap() <= bound + 1e-15, "a={a}");
            }
        }
    }

    #[test]
    fn h_k_domain_errors() {
        assert!(h_k(1.2, ZetaChoice::new(0.5, 0.5), 1.0, 4).is_err());
        assert!(h_k(0.3, ZetaChoice::new(0.0, 0.5), 1.0, 4).is_err());
        assert!(h_k(0.3, ZetaChoice::new(0.3, 0.7), 0.5, 4).is_err());
    }

    #[test]
    fn s_k_values() {
        let v = s_k(4, 0.2743).unwrap();
        assert!(v > -1.6e-5 && v < -1.4e-5, "{v}");
        assert!(s_k(6, 0.2).unwrap() < s_k(5, 0.2).unwrap());
        assert!(s_k(5, 0.2).unwrap() < s_k(4, 0.2).unwrap());
        assert_eq!(s_k(4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn r_values() {
        assert!(r_ratio(2.7694, 0.4514).unwrap() < 0.5);
        assert!(r_ratio(3.5, 0.4514).unwrap() < 0.4);
        assert!(r_ratio(2.149, 0.2).unwrap() <= 0.495);
        assert!(r_ratio(1.0, 0.0).is_err());
        let l = 2.0;
        assert!((r_ratio(l, 1e-6).unwrap() - r0(l).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn r_monotone_on_grid() {
        for li in 1..40 {
            let l = li as f64 * 0.25;
            let mut prev = r0(l).unwrap();
            for xi in 1..=100 {
                let x = xi as f64 / 100.0;
                let r = r_ratio(l, x).unwrap();
                assert!(r >= prev - 1e-15, "x-monotone l={l} x={x}");
                prev = r;
                let r_next = r_ratio(l + 0.25, x).unwrap();
                assert!(r_next <= r + 1e-15, "lambda-monotone l={l} x={x}");
            }
        }
    }

    #[test]
    fn cosh_below_gaussian() {
        for i in 0..=1000 {
            let x = i as f64 * 0.01;
            assert!(x.cosh() <= (x * x / 2.0).exp() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn core_thresholds() {
        let c3 = c_star(3).unwrap();
        assert!(c3 > 0.9179 && c3 < 0.9180, "{c3}");
        let c4 = c_star(4).unwrap();
        assert!((c4 - 0.9768).abs() < 1e-4, "{c4}");
        for k in 3..=10 {
            let mu = lambda_of(k as f64).unwrap();
            let h = 1e-6;
            let d = (g_k(k, mu + h).unwrap() - g_k(k, mu - h).unwrap()) / (2.0 * h);
            assert!(d > 0.0, "k={k}");
            assert!(c_star(k).unwrap() > c_hat(k).unwrap());
        }
    }

    #[test]
    fn core_sizes_at_threshold_balance() {
        for k in 3..=6 {
            let cs = c_star(k).unwrap();
            let (v, e) = core_sizes(k, cs).unwrap();
            assert!((e / v - 1.0).abs() < 1e-9, "k={k} ratio={}", e / v);
        }
        assert_eq!(core_sizes(3, 0.7).unwrap(), (0.0, 0.0));
        assert!(mu_of(3, 0.7).unwrap().is_none());
    }

    #[test]
    fn mu_roots_solve_g() {
        for &c in &[0.85, 0.95, 1.2] {
            let mu = mu_of(3, c).unwrap().unwrap();
            assert!((g_k(3, mu).unwrap() - c).abs() < 1e-10);
            let (argmin, _) = g_k_minimum(3).unwrap();
            assert!(mu >= argmin);
        }
    }

    #[test]
    fn zeta_choices() {
        let z = zeta_choice(4, 1.0, 0.3).unwrap();
        assert_eq!(z, ZetaChoice::new(0.3, 0.7));
        let m = zeta_choice(4, 1.0, 0.7).unwrap();
        assert!((m.zeta1 - 0.7).abs() < 1e-15 && (m.zeta2 - 0.3).abs() < 1e-15);
        let s = zeta_choice(4, 1.0, 0.01).unwrap();
        assert!((s.zeta1 - 0.05).abs() < 1e-15 && (s.zeta2 - 0.99).abs() < 1e-15);
        let near_one = zeta_choice(4, 1.0, 0.97).unwrap();
        assert_eq!(near_one, ZetaChoice::new(0.95, 0.05));
        for i in 1..50 {
            let z = zeta_choice(4, 0.9, i as f64 / 100.0).unwrap();
            assert!(z.zeta2 >= z.zeta1);
        }
    }

    #[test]
    fn report_fields() {
        let r = ThresholdReport::new(3, Some(0.95)).unwrap();
        let l = r.lambda.unwrap();
        assert!((psi(l).unwrap() - 2.85).abs() < 1e-10 * 2.85);
        let mu = r.mu.unwrap();
        assert!((g_k(3, mu).unwrap() - 0.95).abs() < 1e-10);
        assert!((r.c_star - g_k(3, lambda_of(3.0).unwrap()).unwrap()).abs() < 1e-15);
        let bare = ThresholdReport::new(3, None).unwrap();
        assert!(bare.lambda.is_none());
        assert!(ThresholdReport::new(2, None).is_err());
    }
}
