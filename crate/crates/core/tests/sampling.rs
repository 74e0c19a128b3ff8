use std::collections::BTreeMap;

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};
use xorsat_lab::instance::{
    enumerate_c_model, enumerate_constrained, gen_c_model, gen_unconstrained, CModelSampler, DegreeStrategy,
};
use xorsat_lab::rng::Seed;

/// Pearson statistic and its p-value for observed counts against expected counts.
fn chi_square(observed: &[f64], expected: &[f64]) -> (f64, f64) {
    let stat: f64 = observed.iter().zip(expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    (stat, 1.0 - dist.cdf(stat))
}

#[test]
fn unconstrained_degrees_are_binomial() {
    let (k, n) = (3usize, 10_000usize);
    let inst = gen_unconstrained(k, n, n, Seed::new(41, 0)).unwrap();
    let law = Binomial::new(k as f64 / n as f64, n as u64).unwrap();
    // Buckets 0..=8 and a tail, so every expected count exceeds 5.
    let buckets = 10;
    let mut observed = vec![0.0; buckets];
    for d in inst.degrees() {
        observed[d.min(buckets - 1)] += 1.0;
    }
    let mut expected: Vec<f64> = (0..buckets - 1).map(|d| law.pmf(d as u64) * n as f64).collect();
    expected.push(n as f64 - expected.iter().sum::<f64>());
    let (stat, p) = chi_square(&observed, &expected);
    assert!(p > 1e-3, "chi2 {stat:.2}, p {p:.2e}");
}

#[test]
fn chip_model_is_uniform_on_small_support() {
    let (k, m, n) = (3, 2, 2);
    let support = enumerate_c_model(k, m, n).unwrap();
    assert_eq!(support.len(), 50);
    let index: BTreeMap<Vec<usize>, usize> =
        support.iter().enumerate().map(|(i, a)| (a.chip_columns.clone(), i)).collect();
    let samples = 100_000u64;
    let mut observed = vec![0.0; support.len()];
    for t in 0..samples {
        let a = gen_c_model(k, m, n, Seed::new(42, t)).unwrap();
        observed[index[&a.chip_columns]] += 1.0;
    }
    let expected = vec![samples as f64 / support.len() as f64; support.len()];
    let (stat, p) = chi_square(&observed, &expected);
    assert!(p > 1e-3, "chi2 {stat:.2}, p {p:.2e}");
}

#[test]
fn constrained_model_is_uniform_on_small_support() {
    let (k, m, n) = (3, 3, 4);
    let support = enumerate_constrained(k, m, n).unwrap();
    assert_eq!(support.len(), 24);
    let index: BTreeMap<Vec<Vec<usize>>, usize> = support.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let sampler = CModelSampler::new(k, m, n, DegreeStrategy::ExactTable).unwrap();
    let samples = 48_000u64;
    let mut observed = vec![0.0; support.len()];
    for t in 0..samples {
        let (rows, _) = sampler.sample_constrained(&mut Seed::new(43, t).rng(), 1_000_000).unwrap();
        observed[index[&rows]] += 1.0;
    }
    let expected = vec![samples as f64 / support.len() as f64; support.len()];
    let (stat, p) = chi_square(&observed, &expected);
    assert!(p > 1e-3, "chi2 {stat:.2}, p {p:.2e}");
}

#[test]
fn constrained_model_with_a_single_point() {
    let support = enumerate_constrained(3, 2, 3).unwrap();
    assert_eq!(support, vec![vec![vec![0, 1, 2], vec![0, 1, 2]]]);
    let sampler = CModelSampler::new(3, 2, 3, DegreeStrategy::ExactTable).unwrap();
    for t in 0..50 {
        let (rows, _) = sampler.sample_constrained(&mut Seed::new(44, t).rng(), 1_000_000).unwrap();
        assert_eq!(rows, support[0]);
    }
}

#[test]
fn degree_strategies_agree_on_column_sums() {
    let (k, m, n) = (3, 2, 2);
    let samples = 20_000u64;
    let mut tallies = Vec::new();
    for strategy in [DegreeStrategy::ExactTable, DegreeStrategy::Resample] {
        let sampler = CModelSampler::new(k, m, n, strategy).unwrap();
        let mut counts = BTreeMap::new();
        let mut retries = 0u64;
        for t in 0..samples {
            let mut degrees = Vec::new();
            retries += sampler.sample_degrees(&mut Seed::new(45, t).rng(), &mut degrees).unwrap();
            *counts.entry(degrees[0]).or_insert(0u64) += 1;
        }
        println!("{strategy:?}: {:.3} retries per draw", retries as f64 / samples as f64);
        tallies.push(counts);
    }
    // Column sums of 𝒞_{2,2} at k=3: (2,4), (3,3), (4,2) with 15, 20, 15 points.
    for counts in &tallies {
        let observed: Vec<f64> = [2, 3, 4].iter().map(|d| *counts.get(d).unwrap_or(&0) as f64).collect();
        let expected: Vec<f64> = [15.0, 20.0, 15.0].iter().map(|w| w / 50.0 * samples as f64).collect();
        let (stat, p) = chi_square(&observed, &expected);
        assert!(p > 1e-3, "chi2 {stat:.2}, p {p:.2e}");
    }
}
