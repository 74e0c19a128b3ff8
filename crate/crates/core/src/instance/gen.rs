//! Random instance generators.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Instance, ModelTag};
use crate::error::{invalid, Error, Result};
use crate::rng::Seed;
use crate::thresholds::{gamma, lambda_of};

/// Rejections allowed by [`gen_constrained`] before giving up.
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

/// Pmf entries below this fraction of the mode are dropped from the excess
/// table; the discarded tail mass is far below double precision.
const PMF_CUTOFF: f64 = 1e-30;

/// Uniform unconstrained instance: every row is an independent uniform
/// `k`-subset of the `n` variables and every right-hand side bit is fair.
pub fn gen_unconstrained(k: usize, m: usize, n: usize, seed: Seed) -> Result<Instance> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let mut rng = seed.rng();
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let mut row = rand::seq::index::sample(&mut rng, n, k).into_vec();
        row.sort_unstable();
        rows.push(row);
    }
    let rhs = (0..m).map(|_| rng.random::<bool>()).collect();
    Ok(Instance {
        k,
        n,
        m,
        rows,
        rhs,
        model_tag: ModelTag::Unconstrained,
        seed: Some(seed),
    })
}

fn ln_f(lambda: f64) -> f64 {
    if lambda < 1.0 {
        crate::thresholds::f(lambda).ln()
    } else {
        lambda + (-(-lambda).exp() * (1.0 + lambda)).ln_1p()
    }
}

/// One draw of `Z(λ)`: Poisson(λ) conditioned on being at least 2.
pub fn sample_truncated_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<usize> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("truncated Poisson needs lambda > 0, got {lambda}")));
    }
    if lambda >= 1.0 {
        // Rejection from the plain Poisson; acceptance is at least 1 - 2/e.
        let poisson = Poisson::new(lambda).map_err(|e| invalid(e.to_string()))?;
        loop {
            let x = poisson.sample(rng) as usize;
            if x >= 2 {
                return Ok(x);
            }
        }
    }
    // Inversion: P(Z = j) = λ^j / (j! f(λ)).
    let norm = crate::thresholds::f(lambda);
    let mut u = rng.random::<f64>() * norm;
    let mut term = lambda * lambda / 2.0;
    let mut j = 2usize;
    loop {
        if u < term || term == 0.0 {
            return Ok(j);
        }
        u -= term;
        j += 1;
        term *= lambda / j as f64;
    }
}

/// Distribution of `Y₁ + … + Y_j` for i.i.d. excesses `Y = Z(λ) - 2`,
/// used to draw column totals conditioned on their sum exactly.
#[derive(Debug, Clone)]
pub struct ExcessTable {
    lambda: f64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    /// `rows[j][e]` is proportional to `P(Y₁+…+Y_j = e)`; each row is scaled to max 1.
    rows: Vec<Vec<f64>>,
    /// `ln` of the factor undoing the scaling of each row.
    ln_scale: Vec<f64>,
}

impl ExcessTable {
    /// Table for `n` columns with total excess up to `excess`.
    pub fn new(lambda: f64, n: usize, excess: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        let lnf = ln_f(lambda);
        let mut ln_fact = 2f64.ln();
        let mut pmf = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        for y in 0..=excess {
            let j = y + 2;
            if y > 0 {
                ln_fact += (j as f64).ln();
            }
            let lp = j as f64 * lambda.ln() - ln_fact - lnf;
            peak = peak.max(lp);
            if lp < peak + PMF_CUTOFF.ln() && (j as f64) > lambda {
                break;
            }
            pmf.push(lp.exp());
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        let mut rows = Vec::with_capacity(n + 1);
        let mut ln_scale = Vec::with_capacity(n + 1);
        let mut first = vec![0.0; excess + 1];
        first[0] = 1.0;
        rows.push(first);
        ln_scale.push(0.0);
        for j in 1..=n {
            let prev = &rows[j - 1];
            let mut row = vec![0.0; excess + 1];
            for (e, slot) in row.iter_mut().enumerate() {
                let top = e.min(pmf.len() - 1);
                let mut s = 0.0;
                for y in 0..=top {
                    s += pmf[y] * prev[e - y];
                }
                *slot = s;
            }
            let max = row.iter().cloned().fold(0.0, f64::max);
            if max > 0.0 {
                row.iter_mut().for_each(|x| *x /= max);
            }
            ln_scale.push(ln_scale[j - 1] + max.ln());
            rows.push(row);
        }
        Ok(Self {
            lambda,
            pmf,
            cdf,
            rows,
            ln_scale,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn columns(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn max_excess(&self) -> usize {
        self.rows[0].len() - 1
    }

    /// `ln P(Y₁ + … + Y_j = e)`.
    pub fn ln_prob(&self, j: usize, e: usize) -> f64 {
        self.rows[j][e].ln() + self.ln_scale[j]
    }

    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.pmf.len() - 1)
    }

    /// Column totals `Z₁, …, Z_n` conditioned on `Σ (Z_i - 2) = excess`.
    ///
    /// Each column is drawn from its exact conditional law given the columns
    /// still to come, by rejection against the unconditional pmf.
    pub fn sample<R: Rng + ?Sized>(&self, excess: usize, rng: &mut R, out: &mut Vec<usize>) -> Result<()> {
        let n = self.columns();
        if excess > self.max_excess() || self.rows[n][excess] == 0.0 {
            return Err(Error::Infeasible(format!("total excess {excess} impossible for {n} columns")));
        }
        out.clear();
        let mut rest = excess;
        for j in (1..=n).rev() {
            let prev = &self.rows[j - 1];
            let y = loop {
                let y = self.propose(rng);
                if y > rest {
                    continue;
                }
                let accept = prev[rest - y];
                if accept >= 1.0 || (accept > 0.0 && rng.random::<f64>() < accept) {
                    break y;
                }
            };
            rest -= y;
            out.push(y + 2);
        }
        Ok(())
    }
}

/// How column totals of the chip model are conditioned on their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeStrategy {
    /// Sequential draws from exact conditional laws (see [`ExcessTable`]).
    #[default]
    ExactTable,
    /// Redraw the whole i.i.d. vector until the sum matches.
    Resample,
}

/// A point of the chip model `𝒞_{m,n}`: chip `t` belongs to row `t / k` and
/// sits in column `chip_columns[t]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChipAllocation {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub chip_columns: Vec<usize>,
}

impl ChipAllocation {
    /// Nonzero cell counts keyed by `(row, column)`.
    pub fn cell_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut cells = BTreeMap::new();
        for (t, &col) in self.chip_columns.iter().enumerate() {
            *cells.entry((t / self.k, col)).or_insert(0) += 1;
        }
        cells
    }

    pub fn row_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.m];
        for t in 0..self.chip_columns.len() {
            sums[t / self.k] += 1;
        }
        sums
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.n];
        for &c in &self.chip_columns {
            sums[c] += 1;
        }
        sums
    }

    /// Rows as sorted column multisets, with the given right-hand side.
    pub fn to_instance(&self, rhs: Vec<bool>) -> Result<Instance> {
        let rows = self
            .chip_columns
            .chunks(self.k)
            .map(|chunk| {
                let mut row = chunk.to_vec();
                row.sort_unstable();
                row
            })
            .collect();
        Instance::new(self.k, self.n, rows, rhs, ModelTag::RelaxedC)
    }
}

/// Number of chip pairs sharing a cell, `Σ C(c_ij, 2)`.
pub fn collision_count(alloc: &ChipAllocation) -> u64 {
    alloc
        .cell_counts()
        .values()
        .map(|&c| (c * c.saturating_sub(1) / 2) as u64)
        .sum()
}

/// Reusable sampler for the chip model and, by rejection, the constrained
/// model at fixed `(k, m, n)`.
#[derive(Debug, Clone)]
pub struct CModelSampler {
    k: usize,
    m: usize,
    n: usize,
    lambda: f64,
    strategy: DegreeStrategy,
    table: Option<ExcessTable>,
}

impl CModelSampler {
    pub fn new(k: usize, m: usize, n: usize, strategy: DegreeStrategy) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(invalid(format!("need k >= 1 and n >= 1, got k={k} n={n}")));
        }
        if k * m < 2 * n {
            return Err(invalid(format!("chip model empty: km={} < 2n={}", k * m, 2 * n)));
        }
        let excess = k * m - 2 * n;
        // With zero excess every column total is exactly 2; λ is then irrelevant.
        let lambda = if excess == 0 { 1.0 } else { lambda_of(k as f64 * m as f64 / n as f64)? };
        let table = match strategy {
            DegreeStrategy::ExactTable => Some(ExcessTable::new(lambda, n, excess)?),
            DegreeStrategy::Resample => None,
        };
        Ok(Self {
            k,
            m,
            n,
            lambda,
            strategy,
            table,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn strategy(&self) -> DegreeStrategy {
        self.strategy
    }

    /// Limiting collision rate `γ` at this `λ`.
    pub fn gamma(&self) -> f64 {
        gamma(self.k.max(3), self.lambda).unwrap_or(f64::NAN)
    }

    /// Column totals summing to `km`; returns the number of discarded whole
    /// vectors (always 0 for the table strategy).
    pub fn sample_degrees<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) -> Result<u64> {
        let excess = self.k * self.m - 2 * self.n;
        if excess == 0 {
            out.clear();
            out.resize(self.n, 2);
            return Ok(0);
        }
        match &self.table {
            Some(table) => {
                table.sample(excess, rng, out)?;
                Ok(0)
            }
            None => {
                let target = self.k * self.m;
                let mut retries = 0;
                loop {
                    out.clear();
                    let mut sum = 0;
                    for _ in 0..self.n {
                        let z = sample_truncated_poisson(self.lambda, rng)?;
                        sum += z;
                        out.push(z);
                    }
                    if sum == target {
                        return Ok(retries);
                    }
                    retries += 1;
                }
            }
        }
    }

    fn labels_from_degrees(degrees: &[usize], labels: &mut Vec<usize>) {
        labels.clear();
        for (col, &d) in degrees.iter().enumerate() {
            labels.extend(std::iter::repeat_n(col, d));
        }
    }

    /// A uniform point of `𝒞_{m,n}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ChipAllocation> {
        let mut degrees = Vec::with_capacity(self.n);
        self.sample_degrees(rng, &mut degrees)?;
        let mut labels = Vec::with_capacity(self.k * self.m);
        Self::labels_from_degrees(&degrees, &mut labels);
        for t in 0..labels.len() {
            let s = rng.random_range(t..labels.len());
            labels.swap(t, s);
        }
        Ok(ChipAllocation {
            k: self.k,
            m: self.m,
            n: self.n,
            chip_columns: labels,
        })
    }

    /// One attempt at a collision-free allocation. The shuffle stops at the
    /// first chip landing in a cell that is already occupied.
    fn attempt_simple<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        degrees: &mut Vec<usize>,
        labels: &mut Vec<usize>,
    ) -> Result<bool> {
        self.sample_degrees(rng, degrees)?;
        Self::labels_from_degrees(degrees, labels);
        let total = labels.len();
        for t in 0..total {
            let s = rng.random_range(t..total);
            labels.swap(t, s);
            let row_start = t - t % self.k;
            if labels[row_start..t].contains(&labels[t]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A uniform instance of the constrained model, plus the number of
    /// rejected allocations.
    pub fn sample_constrained<R: Rng + ?Sized>(&self, rng: &mut R, budget: u64) -> Result<(Vec<Vec<usize>>, u64)> {
        if self.k > self.n {
            return Err(invalid(format!("need k <= n, got k={} n={}", self.k, self.n)));
        }
        let mut degrees = Vec::with_capacity(self.n);
        let mut labels = Vec::with_capacity(self.k * self.m);
        let mut rejections = 0u64;
        loop {
            if self.attempt_simple(rng, &mut degrees, &mut labels)? {
                let rows = labels
                    .chunks(self.k)
                    .map(|c| {
                        let mut row = c.to_vec();
                        row.sort_unstable();
                        row
                    })
                    .collect();
                return Ok((rows, rejections));
            }
            rejections += 1;
            if rejections >= budget {
                let g = self.gamma();
                return Err(Error::RejectionBudget {
                    budget,
                    detail: format!(
                        "k={} m={} n={} lambda={:.6} gamma={:.4} expected acceptance {:.3e}",
                        self.k,
                        self.m,
                        self.n,
                        self.lambda,
                        g,
                        (-g).exp()
                    ),
                });
            }
        }
    }

    /// Whether one fresh allocation is collision free (for acceptance-rate
    /// statistics).
    pub fn accepts_once<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        let mut degrees = Vec::with_capacity(self.n);
        let mut labels = Vec::with_capacity(self.k * self.m);
        self.attempt_simple(rng, &mut degrees, &mut labels)
    }
}

/// A uniform point of the chip model `𝒞_{m,n}`.
pub fn gen_c_model(k: usize, m: usize, n: usize, seed: Seed) -> Result<ChipAllocation> {
    CModelSampler::new(k, m, n, DegreeStrategy::default())?.sample(&mut seed.rng())
}

/// A uniform instance of the constrained model (row sums `k`, every column
/// sum at least two), with fair right-hand side bits.
pub fn gen_constrained(k: usize, m: usize, n: usize, seed: Seed) -> Result<Instance> {
    if k > n {
        return Err(invalid(format!("need k <= n, got k={k} n={n}")));
    }
    let sampler = CModelSampler::new(k, m, n, DegreeStrategy::default())?;
    constrained_from(&sampler, seed, DEFAULT_REJECTION_BUDGET)
}

/// A constrained instance drawn with a prepared sampler and an explicit rejection budget.
pub fn constrained_from(sampler: &CModelSampler, seed: Seed, budget: u64) -> Result<Instance> {
    let mut rng = seed.rng();
    let (rows, _) = sampler.sample_constrained(&mut rng, budget)?;
    let rhs = (0..sampler.m).map(|_| rng.random::<bool>()).collect();
    Ok(Instance {
        k: sampler.k,
        n: sampler.n,
        m: sampler.m,
        rows,
        rhs,
        model_tag: ModelTag::Constrained,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::{psi, var_z};

    #[test]
    fn unconstrained_basics() {
        let inst = gen_unconstrained(4, 10, 4, Seed::new(1, 0)).unwrap();
        assert!(inst.rows.iter().all(|r| r == &vec![0, 1, 2, 3]));
        assert!(gen_unconstrained(5, 3, 4, Seed::new(1, 0)).is_err());
        let a = gen_unconstrained(3, 50, 40, Seed::new(9, 2)).unwrap();
        let b = gen_unconstrained(3, 50, 40, Seed::new(9, 2)).unwrap();
        assert_eq!(super::super::encode_binary(&a), super::super::encode_binary(&b));
        a.validate().unwrap();
    }

    #[test]
    fn truncated_poisson_small_lambda() {
        let mut rng = Seed::new(3, 0).rng();
        let twos = (0..100_000)
            .filter(|_| sample_truncated_poisson(1e-3, &mut rng).unwrap() == 2)
            .count();
        assert!(twos >= 99_900, "{twos}");
        assert!(sample_truncated_poisson(0.0, &mut rng).is_err());
        assert!(sample_truncated_poisson(-1.0, &mut rng).is_err());
    }

    #[test]
    fn truncated_poisson_moments() {
        for &lambda in &[0.5, 2.1491, 3.058] {
            let mut rng = Seed::new(5, 1).rng();
            let n = 200_000;
            let xs: Vec<f64> = (0..n).map(|_| sample_truncated_poisson(lambda, &mut rng).unwrap() as f64).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let v = var_z(lambda).unwrap();
            let se = (v / n as f64).sqrt();
            assert!((mean - psi(lambda).unwrap()).abs() < 3.5 * se, "lambda={lambda} mean={mean}");
            // Var of the sample variance is about (μ4 - σ⁴)/n; 4σ²/√n is a loose envelope.
            assert!((var - v).abs() < 4.0 * v * (2.0 / n as f64).sqrt() * 3.0, "lambda={lambda} var={var} v={v}");
        }
    }

    #[test]
    fn excess_table_probabilities() {
        let lambda = 1.3;
        let t = ExcessTable::new(lambda, 4, 12).unwrap();
        // Direct convolution of the pmf as the oracle.
        let lnf = ln_f(lambda);
        let pmf: Vec<f64> = (0..=12)
            .map(|y| {
                let j = y + 2;
                let lf: f64 = (1..=j).map(|i| (i as f64).ln()).sum();
                (j as f64 * lambda.ln() - lf - lnf).exp()
            })
            .collect();
        let mut conv = vec![1.0];
        for j in 1..=4 {
            let mut next = vec![0.0; 13];
            for (e, slot) in next.iter_mut().enumerate() {
                for y in 0..=e {
                    if e - y < conv.len() {
                        *slot += pmf[y] * conv[e - y];
                    }
                }
            }
            conv = next;
            for e in 0..=12 {
                assert!((t.ln_prob(j, e) - conv[e].ln()).abs() < 1e-12, "j={j} e={e}");
            }
        }
    }

    #[test]
    fn degrees_sum_and_floor() {
        for strategy in [DegreeStrategy::ExactTable, DegreeStrategy::Resample] {
            let s = CModelSampler::new(3, 40, 50, strategy).unwrap();
            let mut rng = Seed::new(2, 0).rng();
            let mut d = Vec::new();
            for _ in 0..50 {
                s.sample_degrees(&mut rng, &mut d).unwrap();
                assert_eq!(d.iter().sum::<usize>(), 120);
                assert!(d.iter().all(|&x| x >= 2));
            }
        }
        let tight = CModelSampler::new(3, 2, 3, DegreeStrategy::ExactTable).unwrap();
        let mut d = Vec::new();
        tight.sample_degrees(&mut Seed::new(0, 0).rng(), &mut d).unwrap();
        assert_eq!(d, vec![2, 2, 2]);
    }

    #[test]
    fn chip_allocation_structure() {
        let mut rng = Seed::new(11, 0).rng();
        let s = CModelSampler::new(3, 60, 50, DegreeStrategy::ExactTable).unwrap();
        for _ in 0..100 {
            let a = s.sample(&mut rng).unwrap();
            assert!(a.row_sums().iter().all(|&r| r == 3));
            assert!(a.column_sums().iter().all(|&c| c >= 2));
            assert_eq!(a.chip_columns.len(), 180);
        }
        assert!(CModelSampler::new(3, 2, 4, DegreeStrategy::ExactTable).is_err());
    }

    #[test]
    fn collision_counts() {
        let a = ChipAllocation {
            k: 3,
            m: 2,
            n: 3,
            chip_columns: vec![0, 1, 2, 0, 1, 2],
        };
        assert_eq!(collision_count(&a), 0);
        let b = ChipAllocation {
            k: 3,
            m: 2,
            n: 3,
            chip_columns: vec![0, 0, 0, 1, 1, 2],
        };
        assert_eq!(collision_count(&b), 3 + 1);
    }

    #[test]
    fn constrained_structure() {
        for seed in 0..20 {
            let inst = gen_constrained(4, 90, 100, Seed::new(seed, 0)).unwrap();
            inst.validate().unwrap();
            assert!(inst.degrees().iter().all(|&d| d >= 2));
            assert!(inst.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1])));
        }
        assert!(gen_constrained(4, 40, 100, Seed::new(0, 0)).is_err());
    }

    #[test]
    fn budget_error_reports() {
        let s = CModelSampler::new(4, 1100, 1000, DegreeStrategy::ExactTable).unwrap();
        let err = s.sample_constrained(&mut Seed::new(1, 1).rng(), 1).unwrap_err();
        assert!(matches!(err, Error::RejectionBudget { budget: 1, .. }), "{err}");
    }
}
