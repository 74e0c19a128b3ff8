//! Counting and exhaustive enumeration of the chip and constrained models.

use num_bigint::BigUint;

use super::gen::{ChipAllocation, ExcessTable};
use crate::error::{invalid, Error, Result};
use crate::thresholds::series::EXACT_CHIP_LIMIT;
use crate::thresholds::{f, lambda_of, var_z};

/// Largest `km` accepted by the log-space count.
pub const LOG_CHIP_LIMIT: usize = 600;

/// Largest number of candidate objects visited by the brute-force enumerators.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// `|𝒞_{m,n}|` as a natural log, and exactly when small enough.
#[derive(Debug, Clone, PartialEq)]
pub struct CCount {
    pub ln: f64,
    pub exact: Option<BigUint>,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn check_nonempty(k: usize, m: usize, n: usize) -> Result<()> {
    if n == 0 || k * m < 2 * n {
        return Err(invalid(format!("chip model empty: km={} < 2n={}", k * m, 2 * n)));
    }
    Ok(())
}

/// `|𝒞_{m,n}| = (km)! [z^{km}] f(z)^n`, the number of ways to place `km`
/// labelled chips into `n` columns with at least two chips per column.
///
/// Exact big integer for `km ≤ 120`; log-space convolution up to `km ≤ 600`.
pub fn count_c_exact(k: usize, m: usize, n: usize) -> Result<CCount> {
    check_nonempty(k, m, n)?;
    let chips = k * m;
    if chips <= EXACT_CHIP_LIMIT {
        let w = crate::thresholds::series::at_least_two_counts(n, chips);
        let exact = w[n][chips].clone();
        let ln = crate::thresholds::series::big_ln(&exact);
        return Ok(CCount { ln, exact: Some(exact) });
    }
    if chips > LOG_CHIP_LIMIT {
        return Err(Error::TooLarge {
            what: "km",
            value: chips,
            limit: LOG_CHIP_LIMIT,
        });
    }
    let excess = chips - 2 * n;
    if excess == 0 {
        return Ok(CCount {
            ln: ln_factorial(chips) - n as f64 * std::f64::consts::LN_2,
            exact: None,
        });
    }
    let lambda = lambda_of(chips as f64 / n as f64)?;
    let table = ExcessTable::new(lambda, n, excess)?;
    let ln = ln_factorial(chips) + n as f64 * f(lambda).ln() - chips as f64 * lambda.ln() + table.ln_prob(n, excess);
    Ok(CCount { ln, exact: None })
}

/// Local-limit approximation `ln[(km)! f(λ)^n λ^{-km} / √(2πn Var Z(λ))]`.
pub fn count_c_asymptotic_ln(k: usize, m: usize, n: usize) -> Result<f64> {
    check_nonempty(k, m, n)?;
    let chips = k * m;
    if chips == 2 * n {
        return Err(invalid("asymptotic form needs km > 2n"));
    }
    let lambda = lambda_of(chips as f64 / n as f64)?;
    let v = var_z(lambda)?;
    Ok(ln_factorial(chips) + n as f64 * f(lambda).ln()
        - chips as f64 * lambda.ln()
        - 0.5 * (2.0 * std::f64::consts::PI * n as f64 * v).ln())
}

fn check_limit(candidates: Option<u64>) -> Result<()> {
    match candidates {
        Some(c) if c <= ENUMERATION_LIMIT => Ok(()),
        _ => Err(Error::TooLarge {
            what: "enumeration size",
            value: candidates.map_or(usize::MAX, |c| c as usize),
            limit: ENUMERATION_LIMIT as usize,
        }),
    }
}

/// Every point of `𝒞_{m,n}`, in lexicographic order of the chip columns.
pub fn enumerate_c_model(k: usize, m: usize, n: usize) -> Result<Vec<ChipAllocation>> {
    check_nonempty(k, m, n)?;
    let chips = k * m;
    check_limit((n as u64).checked_pow(chips as u32))?;
    let mut out = Vec::new();
    let mut assign = vec![0usize; chips];
    let mut counts = vec![0usize; n];
    counts[0] = chips;
    loop {
        if counts.iter().all(|&c| c >= 2) {
            out.push(ChipAllocation {
                k,
                m,
                n,
                chip_columns: assign.clone(),
            });
        }
        // Odometer increment from the last chip.
        let mut i = chips;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            counts[assign[i]] -= 1;
            assign[i] += 1;
            if assign[i] < n {
                counts[assign[i]] += 1;
                break;
            }
            assign[i] = 0;
            counts[0] += 1;
        }
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Every 0-1 matrix with `m` rows of weight `k` over `n` columns whose column
/// sums are all at least two, as lists of sorted rows.
pub fn enumerate_constrained(k: usize, m: usize, n: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let subsets = k_subsets(n, k);
    check_limit((subsets.len() as u64).checked_pow(m as u32))?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let mut deg = vec![0usize; n];
        for &i in &idx {
            for &v in &subsets[i] {
                deg[v] += 1;
            }
        }
        if deg.iter().all(|&d| d >= 2) {
            out.push(idx.iter().map(|&i| subsets[i].clone()).collect());
        }
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < subsets.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let c = count_c_exact(3, 2, 2).unwrap();
        assert_eq!(c.exact.unwrap(), BigUint::from(50u32));
        for &(k, m) in &[(3usize, 1usize), (2, 3), (4, 2)] {
            assert_eq!(count_c_exact(k, m, 1).unwrap().exact.unwrap(), BigUint::from(1u32));
        }
        assert!(count_c_exact(3, 2, 4).is_err());
        assert!(count_c_exact(3, 201, 100).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        for &(k, m, n) in &[(3usize, 2usize, 2usize), (3, 2, 3), (2, 4, 3), (3, 3, 4), (4, 2, 3), (2, 6, 4), (3, 4, 4)] {
            let listed = enumerate_c_model(k, m, n).unwrap().len();
            let counted = count_c_exact(k, m, n).unwrap().exact.unwrap();
            assert_eq!(counted, BigUint::from(listed), "k={k} m={m} n={n}");
        }
    }

    #[test]
    fn log_mode_matches_exact_mode() {
        // km = 120 sits on the exact side; evaluate the log path directly.
        let (k, m, n) = (3usize, 40usize, 45usize);
        let exact = count_c_exact(k, m, n).unwrap();
        let lambda = lambda_of(120.0 / 45.0).unwrap();
        let table = ExcessTable::new(lambda, n, 120 - 90).unwrap();
        let ln = ln_factorial(120) + 45.0 * f(lambda).ln() - 120.0 * lambda.ln() + table.ln_prob(n, 30);
        assert!((ln - exact.ln).abs() < 1e-9 * exact.ln, "{ln} vs {}", exact.ln);
        let log_only = count_c_exact(3, 41, 45).unwrap();
        assert!(log_only.exact.is_none() && log_only.ln > exact.ln);
    }

    #[test]
    fn constrained_enumeration() {
        assert_eq!(enumerate_constrained(3, 3, 3).unwrap(), vec![vec![vec![0, 1, 2]; 3]]);
        assert_eq!(enumerate_constrained(3, 3, 4).unwrap().len(), 24);
        assert_eq!(k_subsets(5, 2).len(), 10);
    }

    #[test]
    fn asymptotic_close_to_exact() {
        let exact = count_c_exact(3, 100, 100).unwrap().ln;
        let approx = count_c_asymptotic_ln(3, 100, 100).unwrap();
        let ratio = (exact - approx).exp();
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");
    }
}
