//! Exact coefficient extraction for chip-model counts and the expected number
//! of critical row sets, plus the matching exponential upper bounds.
//!
//! All exact routines count labelled chip placements as big integers, so the
//! factorial prefactors never appear explicitly: `s! [z^s] g(z)^j` is built by
//! a column-by-column DP with binomial weights.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{f, lambda_of, ZetaChoice};
use crate::error::{invalid, Error, Result};

/// Largest `km` accepted by the big-integer routines.
pub const EXACT_CHIP_LIMIT: usize = 120;

fn check_budget(chips: usize) -> Result<()> {
    if chips > EXACT_CHIP_LIMIT {
        return Err(Error::TooLarge {
            what: "km",
            value: chips,
            limit: EXACT_CHIP_LIMIT,
        });
    }
    Ok(())
}

pub(crate) fn pascal(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigUint::one(); i + 1];
        for j in 1..i {
            row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// `W[j][s]` = number of ways to place `s` labelled chips into `j` columns
/// where every column receives a count allowed by `admit`.
fn column_counts(
    cols: usize,
    chips: usize,
    binom: &[Vec<BigUint>],
    admit: impl Fn(usize) -> bool,
) -> Vec<Vec<BigUint>> {
    let mut w = vec![vec![BigUint::zero(); chips + 1]; cols + 1];
    w[0][0] = BigUint::one();
    for j in 1..=cols {
        for s in 0..=chips {
            let mut acc = BigUint::zero();
            for d in (0..=s).filter(|&d| admit(d)) {
                let prev = &w[j - 1][s - d];
                if !prev.is_zero() {
                    acc += &binom[s][d] * prev;
                }
            }
            w[j][s] = acc;
        }
    }
    w
}

/// `s! [z^s] f(z)^j` for all `j ≤ cols`, `s ≤ chips`.
pub(crate) fn at_least_two_counts(cols: usize, chips: usize) -> Vec<Vec<BigUint>> {
    let binom = pascal(chips);
    column_counts(cols, chips, &binom, |d| d >= 2)
}

/// `a(ℓ, ν) = (kℓ)! [z^{kℓ}] (cosh z - 1)^ν`: placements of the `kℓ` chips of
/// `ℓ` rows into `ν` columns, each column receiving a positive even number.
pub fn exact_a(k: usize, ell: usize, nu: usize) -> Result<BigUint> {
    let chips = k * ell;
    check_budget(chips)?;
    let binom = pascal(chips);
    let w = column_counts(nu, chips, &binom, |d| d >= 2 && d % 2 == 0);
    Ok(w[nu][chips].clone())
}

/// `b(m-ℓ, ν) = (k(m-ℓ))! [z^{k(m-ℓ)}] e^{νz} f(z)^{n-ν}`: placements of the
/// remaining chips with no constraint on the first `ν` columns and at least two
/// chips in each of the other `n - ν`.
pub fn exact_b(k: usize, m: usize, ell: usize, nu: usize, n: usize) -> Result<BigUint> {
    if ell > m || nu > n {
        return Err(invalid(format!("need ell <= m and nu <= n, got ell={ell} m={m} nu={nu} n={n}")));
    }
    check_budget(k * m)?;
    let chips = k * (m - ell);
    let binom = pascal(chips);
    let w = column_counts(n - nu, chips, &binom, |d| d >= 2);
    Ok(b_from_tables(chips, nu, n, &binom, &w))
}

fn b_from_tables(
    chips: usize,
    nu: usize,
    n: usize,
    binom: &[Vec<BigUint>],
    w: &[Vec<BigUint>],
) -> BigUint {
    let rest = &w[n - nu];
    let nu_big = BigUint::from(nu);
    let mut power = BigUint::one();
    let mut total = BigUint::zero();
    for s in 0..=chips {
        if s > 0 {
            power *= &nu_big;
        }
        let r = &rest[chips - s];
        if !r.is_zero() && !power.is_zero() {
            total += &binom[chips][s] * &power * r;
        }
    }
    total
}

/// Exact `E[Y^(ℓ)]` in the chip model `𝒞_{m,n}`: the expected number of sets of
/// `ℓ` rows whose chip counts are even in every column.
pub fn exact_ey(k: usize, m: usize, n: usize, ell: usize) -> Result<BigRational> {
    if ell > m {
        return Err(invalid(format!("ell={ell} exceeds m={m}")));
    }
    if k * m < 2 * n {
        return Err(invalid(format!("chip model empty: km={} < 2n={}", k * m, 2 * n)));
    }
    let total_chips = k * m;
    check_budget(total_chips)?;
    let binom = pascal(total_chips.max(n));
    let even = column_counts(n, k * ell, &binom, |d| d >= 2 && d % 2 == 0);
    let rest_chips = k * (m - ell);
    let two = column_counts(n, total_chips, &binom, |d| d >= 2);
    let size = two[n][total_chips].clone();
    let mut sum = BigUint::zero();
    for nu in 0..=n {
        let a = &even[nu][k * ell];
        if a.is_zero() {
            continue;
        }
        let b = b_from_tables(rest_chips, nu, n, &binom, &two);
        sum += &binom[n][nu] * a * b;
    }
    let numer = &binom[m][ell] * sum;
    Ok(BigRational::new(numer.into(), size.into()))
}

/// `ln` of a positive big integer, accurate to double precision.
pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln` of a positive rational; `-∞` for zero.
pub fn rational_ln(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    big_ln(num) - big_ln(den)
}

/// Exponential part of the bound on `E[Y^(ℓ)]`: `-½ ln ζ₂ + n H_k(α, ζ; c)`
/// with `α = ℓ / round(cn)`. The omitted absolute constant factor is not
/// reported; this is the bound "up to a constant".
pub fn bound_ey(k: usize, c: f64, n: usize, ell: usize, zeta: ZetaChoice) -> Result<f64> {
    let m = (c * n as f64).round() as usize;
    if ell == 0 || ell > m {
        return Err(invalid(format!("need 1 <= ell <= m={m}, got {ell}")));
    }
    let alpha = ell as f64 / m as f64;
    let value = super::h_k(alpha, zeta, c, k)?;
    Ok(-0.5 * zeta.zeta2.ln() + n as f64 * value)
}

/// A constant-free upper bound on `ln E[Y^(ℓ)]` for concrete `(k, m, n)`.
///
/// Chernoff bounds on both `a(ℓ,ν)` and `b(m-ℓ,ν)` at `z_i = ζ_i λ`, with the
/// exact `|𝒞_{m,n}|` in the denominator. Valid for every `ζ > 0`.
pub fn rigorous_log_bound_ey(k: usize, m: usize, n: usize, ell: usize, zeta: ZetaChoice) -> Result<f64> {
    if ell > m || !(zeta.zeta1 > 0.0 && zeta.zeta2 > 0.0) {
        return Err(invalid("need ell <= m and zeta > 0"));
    }
    if k * m <= 2 * n {
        return Err(invalid("need km > 2n so that lambda exists"));
    }
    let lambda = lambda_of(k as f64 * m as f64 / n as f64)?;
    let (z1, z2) = (zeta.zeta1 * lambda, zeta.zeta2 * lambda);
    let size = crate::instance::count_c_exact(k, m, n)?;
    let ln_fact = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_binom = ln_fact(m) - ln_fact(ell) - ln_fact(m - ell);
    let a_chips = (k * ell) as f64;
    let b_chips = (k * (m - ell)) as f64;
    let inner = 0.5 * (f(z1 + z2) + f(z2 - z1));
    Ok(ln_binom + ln_fact(k * ell) + ln_fact(k * (m - ell)) - size.ln
        + n as f64 * inner.ln()
        - a_chips * z1.ln()
        - b_chips * z2.ln())
}
