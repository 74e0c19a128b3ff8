//! Monte Carlo campaigns: satisfiability sweeps, critical-set censuses, core
//! checks, collision statistics and window checks.
//!
//! Every trial draws from its own stream `Seed::for_trial(seed, point, trial)`,
//! and results are merged in trial order, so the CSV bytes do not depend on
//! the number of workers.

pub mod plot;

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::gf2::{count_critical_sets, nullity_transpose, solution_histogram, solve};
use crate::instance::{
    collision_count, constrained_from, gen_unconstrained, CModelSampler, DegreeStrategy, Instance, ModelTag,
    DEFAULT_REJECTION_BUDGET,
};
use crate::peel::two_core;
use crate::rng::Seed;
use crate::thresholds::{core_sizes, mu_of, psi};

/// Largest `m` and `n` for the exact moment cross-check in the census.
pub const EXACT_CHECK_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    SatSweep,
    CriticalCensus,
    CoreCheck,
    CollisionCheck,
    WindowCheck,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "sat_sweep" => Self::SatSweep,
            "critical_census" => Self::CriticalCensus,
            "core_check" => Self::CoreCheck,
            "collision_check" => Self::CollisionCheck,
            "window_check" => Self::WindowCheck,
            _ => return Err(invalid(format!("unknown experiment kind {s:?}"))),
        })
    }
}

/// What a gated metric is compared with: a number or another column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Value(f64),
    Column(String),
}

/// A statistical gate: at grid point `m` (every point when absent), the
/// metric must lie within `tolerance` of the target, relative to the
/// target's magnitude when `relative`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub target: Target,
    pub tolerance: f64,
    #[serde(default)]
    pub relative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub gate: Gate,
    pub m: usize,
    pub value: f64,
    pub target: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub model: ModelTag,
    pub k: usize,
    pub n: usize,
    /// Ratios `m/n`; used when `m_list` is empty.
    pub c_grid: Vec<f64>,
    pub m_list: Vec<usize>,
    /// Window offsets `w`; the window check visits `m = n ± w`.
    pub windows: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub rejection_budget: u64,
    pub gates: Vec<Gate>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::SatSweep,
            model: ModelTag::Unconstrained,
            k: 3,
            n: 1000,
            c_grid: Vec::new(),
            m_list: Vec::new(),
            windows: vec![2, 5, 10, 15],
            trials: 100,
            seed: 1,
            workers: 1,
            out: None,
            rejection_budget: DEFAULT_REJECTION_BUDGET,
            gates: Vec::new(),
        }
    }
}

/// One grid point of a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub index: usize,
    pub m: usize,
    pub c: f64,
    /// Signed window offset `m - n`, for the window check.
    pub offset: i64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers must be at least 1"));
        }
        if self.k < 2 || self.n < self.k {
            return Err(invalid(format!("need 2 <= k <= n, got k={} n={}", self.k, self.n)));
        }
        if self.c_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("c_grid must be strictly increasing"));
        }
        if self.c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(invalid("c_grid entries must be positive"));
        }
        if self.m_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("m_list must be strictly increasing"));
        }
        match self.kind {
            ExperimentKind::WindowCheck => {
                if self.windows.is_empty() || self.windows.iter().any(|&w| w == 0 || w >= self.n) {
                    return Err(invalid("windows must be nonempty with 0 < w < n"));
                }
                if self.model != ModelTag::Constrained || self.k < 3 {
                    return Err(invalid("window check needs the constrained model and k >= 3"));
                }
            }
            ExperimentKind::CoreCheck if self.model != ModelTag::Unconstrained => {
                return Err(invalid("core check needs the unconstrained model"));
            }
            ExperimentKind::CollisionCheck if self.model != ModelTag::RelaxedC => {
                return Err(invalid("collision check needs the relaxed_c model"));
            }
            ExperimentKind::SatSweep | ExperimentKind::CriticalCensus if self.model == ModelTag::RelaxedC => {
                return Err(invalid("sweeps and censuses need a simple model"));
            }
            _ => {}
        }
        if self.kind != ExperimentKind::WindowCheck && self.c_grid.is_empty() && self.m_list.is_empty() {
            return Err(invalid("give c_grid or m_list"));
        }
        Ok(())
    }

    /// The grid points in order.
    pub fn points(&self) -> Vec<Point> {
        let n = self.n as i64;
        let ms: Vec<usize> = if self.kind == ExperimentKind::WindowCheck {
            let mut w = self.windows.clone();
            w.sort_unstable();
            w.dedup();
            let below = w.iter().rev().map(|&w| (n - w as i64) as usize);
            let above = w.iter().map(|&w| (n + w as i64) as usize);
            below.chain(above).collect()
        } else if !self.m_list.is_empty() {
            self.m_list.clone()
        } else {
            self.c_grid.iter().map(|&c| (c * self.n as f64).round() as usize).collect()
        };
        ms.into_iter()
            .enumerate()
            .map(|(index, m)| Point {
                index,
                m,
                c: m as f64 / self.n as f64,
                offset: m as i64 - n,
            })
            .collect()
    }

    /// Reads a JSON config; unknown keys are rejected.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Aggregate row of a satisfiability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: usize,
    pub c: f64,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub sat_count: u64,
    pub sat_fraction: f64,
    /// Mean dimension of the left kernel, `log2(X + 1)`.
    pub mean_nullity: f64,
    pub mean_core_vars: f64,
    pub mean_core_eqs: f64,
    pub core_vars_frac: f64,
    pub core_eqs_frac: f64,
    pub master_seed: u64,
    /// Seconds spent on this point; not written to CSV.
    #[serde(skip)]
    pub wall_time: f64,
}

/// One trial of any campaign. Columns not measured by a campaign are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub point: usize,
    pub m: usize,
    pub trial: u64,
    pub master_seed: u64,
    pub stream: u64,
    pub sat: Option<bool>,
    pub nullity: Option<usize>,
    pub core_vars: Option<usize>,
    pub core_eqs: Option<usize>,
    pub critical_sets: Option<String>,
    pub collisions: Option<u64>,
}

impl TrialRow {
    fn new(point: &Point, trial: u64, seed: Seed) -> Self {
        Self {
            point: point.index,
            m: point.m,
            trial,
            master_seed: seed.master,
            stream: seed.stream,
            sat: None,
            nullity: None,
            core_vars: None,
            core_eqs: None,
            critical_sets: None,
            collisions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub point: usize,
    pub c: f64,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    /// Mean number of nonempty critical sets.
    pub mean_x: f64,
    pub mean_nullity: f64,
    pub zero_fraction: f64,
    /// Instances for which the exact moment identity was checked, and held.
    pub exact_checked: u64,
    pub exact_held: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreRow {
    pub point: usize,
    pub c: f64,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub mean_vars_frac: f64,
    pub mean_eqs_frac: f64,
    pub predicted_vars_frac: f64,
    pub predicted_eqs_frac: f64,
    /// Mean of `M/N` over trials with a nonempty core.
    pub mean_ratio: Option<f64>,
    pub predicted_ratio: Option<f64>,
    pub empty_cores: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRow {
    pub point: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub samples: u64,
    pub gamma: f64,
    pub mean: f64,
    pub factorial2: f64,
    pub gamma_sq: f64,
    pub accept_rate: f64,
    pub exp_neg_gamma: f64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub point: usize,
    pub offset: i64,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub sat_count: u64,
    pub sat_fraction: f64,
    pub unsat_fraction: f64,
    /// `1 - 2·2^{-w}` above the window, absent below it.
    pub envelope: Option<f64>,
    /// `envelope - 3σ`, σ the binomial deviation at the envelope.
    pub envelope_gate: Option<f64>,
    pub within_envelope: Option<bool>,
    /// Whether the sat fraction did not rise above the previous point's by
    /// more than two pooled standard deviations.
    pub monotone: bool,
    pub master_seed: u64,
}

/// Rows of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Sweep(Vec<SweepRow>),
    Census(Vec<CensusRow>),
    Core(Vec<CoreRow>),
    Collision(Vec<CollisionRow>),
    Window(Vec<WindowRow>),
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub rows: Rows,
    pub trials: Vec<TrialRow>,
    pub gates: Vec<GateResult>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub csv_hash: String,
    pub trials_csv_hash: String,
    pub gates: Vec<GateResult>,
    pub all_gates_pass: bool,
}

/// Git-style blob hash of a byte string.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Serializes rows to CSV with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

impl Rows {
    pub fn to_csv(&self) -> Result<String> {
        match self {
            Rows::Sweep(r) => to_csv(r),
            Rows::Census(r) => to_csv(r),
            Rows::Core(r) => to_csv(r),
            Rows::Collision(r) => to_csv(r),
            Rows::Window(r) => to_csv(r),
        }
    }

    fn as_json(&self) -> Result<Vec<serde_json::Map<String, serde_json::Value>>> {
        let value = match self {
            Rows::Sweep(r) => serde_json::to_value(r)?,
            Rows::Census(r) => serde_json::to_value(r)?,
            Rows::Core(r) => serde_json::to_value(r)?,
            Rows::Collision(r) => serde_json::to_value(r)?,
            Rows::Window(r) => serde_json::to_value(r)?,
        };
        Ok(match value {
            serde_json::Value::Array(items) => items
                .into_iter()
                .filter_map(|v| match v {
                    serde_json::Value::Object(o) => Some(o),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        })
    }
}

fn number(v: Option<&serde_json::Value>) -> Option<f64> {
    match v? {
        serde_json::Value::Number(x) => x.as_f64(),
        serde_json::Value::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
        _ => None,
    }
}

/// Evaluates gates against the rows. A gate naming a missing metric fails.
pub fn evaluate_gates(gates: &[Gate], rows: &Rows) -> Result<Vec<GateResult>> {
    let objs = rows.as_json()?;
    let mut out = Vec::new();
    for gate in gates {
        let mut matched = false;
        for o in &objs {
            let m = number(o.get("m")).unwrap_or(f64::NAN) as usize;
            if gate.m.is_some_and(|gm| gm != m) {
                continue;
            }
            matched = true;
            let value = number(o.get(&gate.metric)).unwrap_or(f64::NAN);
            let target = match &gate.target {
                Target::Value(v) => *v,
                Target::Column(c) => number(o.get(c)).unwrap_or(f64::NAN),
            };
            let tol = if gate.relative {
                gate.tolerance * target.abs()
            } else {
                gate.tolerance
            };
            out.push(GateResult {
                gate: gate.clone(),
                m,
                value,
                target,
                pass: (value - target).abs() <= tol,
            });
        }
        if !matched {
            return Err(invalid(format!("gate on {} matches no grid point", gate.metric)));
        }
    }
    Ok(out)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("worker pool: {e}")))
}

/// Runs `trial` for every trial index of a point on the pool, in trial order.
fn run_trials<T: Send>(
    pool: &rayon::ThreadPool,
    cfg: &ExperimentConfig,
    point: &Point,
    trial: impl Fn(Seed) -> Result<T> + Sync,
) -> Result<Vec<(Seed, T)>> {
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = Seed::for_trial(cfg.seed, point.index, t);
                trial(seed).map(|v| (seed, v)).map_err(|e| Error::Trial {
                    point: point.index,
                    trial: t,
                    source: Box::new(e),
                })
            })
            .collect()
    })
}

enum Generator {
    Unconstrained,
    Constrained(CModelSampler),
}

impl Generator {
    fn new(cfg: &ExperimentConfig, m: usize) -> Result<Self> {
        Ok(match cfg.model {
            ModelTag::Unconstrained => Generator::Unconstrained,
            ModelTag::Constrained => Generator::Constrained(CModelSampler::new(cfg.k, m, cfg.n, DegreeStrategy::default())?),
            ModelTag::RelaxedC => return Err(invalid("relaxed_c instances cannot be solved")),
        })
    }

    fn draw(&self, cfg: &ExperimentConfig, m: usize, seed: Seed) -> Result<Instance> {
        match self {
            Generator::Unconstrained => gen_unconstrained(cfg.k, m, cfg.n, seed),
            Generator::Constrained(s) => constrained_from(s, seed, cfg.rejection_budget),
        }
    }
}

struct SolveOutcome {
    sat: bool,
    nullity: usize,
    core_vars: usize,
    core_eqs: usize,
}

/// Peels, then solves the core. Peeled equations never lie in a critical
/// set, so the core's left kernel is the whole system's.
fn peel_and_solve(inst: &Instance) -> Result<SolveOutcome> {
    let (core, _, stats) = two_core(inst)?;
    let a = core.matrix();
    let res = solve(&a, &core.rhs)?;
    Ok(SolveOutcome {
        sat: res.consistent,
        nullity: core.m - res.rank,
        core_vars: stats.core_vars,
        core_eqs: stats.core_eqs,
    })
}

fn mean(xs: impl Iterator<Item = f64>, count: u64) -> f64 {
    xs.sum::<f64>() / count as f64
}

/// Satisfiability sweep over the grid.
pub fn run_sat_sweep(cfg: &ExperimentConfig) -> Result<(Vec<SweepRow>, Vec<TrialRow>)> {
    cfg.validate()?;
    let pool = pool(cfg.workers)?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for p in cfg.points() {
        let start = Instant::now();
        let generator = Generator::new(cfg, p.m)?;
        let results = run_trials(&pool, cfg, &p, |seed| peel_and_solve(&generator.draw(cfg, p.m, seed)?))?;
        let t = cfg.trials;
        let sat_count = results.iter().filter(|(_, r)| r.sat).count() as u64;
        let mean_core_vars = mean(results.iter().map(|(_, r)| r.core_vars as f64), t);
        let mean_core_eqs = mean(results.iter().map(|(_, r)| r.core_eqs as f64), t);
        rows.push(SweepRow {
            point: p.index,
            c: p.c,
            n: cfg.n,
            m: p.m,
            trials: t,
            sat_count,
            sat_fraction: sat_count as f64 / t as f64,
            mean_nullity: mean(results.iter().map(|(_, r)| r.nullity as f64), t),
            mean_core_vars,
            mean_core_eqs,
            core_vars_frac: mean_core_vars / cfg.n as f64,
            core_eqs_frac: mean_core_eqs / cfg.n as f64,
            master_seed: cfg.seed,
            wall_time: start.elapsed().as_secs_f64(),
        });
        for (i, (seed, r)) in results.into_iter().enumerate() {
            let mut row = TrialRow::new(&p, i as u64, seed);
            row.sat = Some(r.sat);
            row.nullity = Some(r.nullity);
            row.core_vars = Some(r.core_vars);
            row.core_eqs = Some(r.core_eqs);
            trials.push(row);
        }
    }
    Ok((rows, trials))
}

/// `E_b[N(b)²] / E_b[N(b)]²` over all right-hand sides, in exact rationals,
/// together with `Σ_b N(b)`.
pub fn exact_moment_ratio(inst: &Instance) -> Result<(BigRational, BigUint)> {
    let hist = solution_histogram(&inst.matrix())?;
    let total: BigUint = hist.iter().map(|&x| BigUint::from(x)).sum();
    let squares: BigUint = hist.iter().map(|&x| BigUint::from(x) * BigUint::from(x)).sum();
    if total.is_zero() {
        return Err(invalid("no assignments"));
    }
    let count = BigUint::from(hist.len());
    // (Σ N² / B) / (Σ N / B)² = B Σ N² / (Σ N)².
    let num = (squares * count).into();
    let den = (&total * &total).into();
    Ok((BigRational::new(num, den), total))
}

struct CensusOutcome {
    x: BigUint,
    nullity: usize,
    exact: Option<bool>,
}

fn census_trial(inst: &Instance) -> Result<CensusOutcome> {
    let a = inst.matrix();
    let x = count_critical_sets(&a);
    let exact = if inst.m <= EXACT_CHECK_LIMIT && inst.n <= EXACT_CHECK_LIMIT {
        let (ratio, total) = exact_moment_ratio(inst)?;
        let expected = BigRational::from_integer((&x + BigUint::one()).into());
        Some(ratio == expected && total == BigUint::one() << inst.n)
    } else {
        None
    };
    Ok(CensusOutcome {
        x,
        nullity: nullity_transpose(&a),
        exact,
    })
}

/// Critical-set census; tiny instances are also checked exactly.
pub fn run_critical_census(cfg: &ExperimentConfig) -> Result<(Vec<CensusRow>, Vec<TrialRow>)> {
    cfg.validate()?;
    if cfg.n > 4000 {
        return Err(invalid(format!("census needs n <= 4000, got {}", cfg.n)));
    }
    let pool = pool(cfg.workers)?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for p in cfg.points() {
        let generator = Generator::new(cfg, p.m)?;
        let results = run_trials(&pool, cfg, &p, |seed| census_trial(&generator.draw(cfg, p.m, seed)?))?;
        let t = cfg.trials;
        let exact_checked = results.iter().filter(|(_, r)| r.exact.is_some()).count() as u64;
        let exact_held = results.iter().filter(|(_, r)| r.exact == Some(true)).count() as u64;
        rows.push(CensusRow {
            point: p.index,
            c: p.c,
            n: cfg.n,
            m: p.m,
            trials: t,
            mean_x: mean(results.iter().map(|(_, r)| r.x.to_f64().unwrap_or(f64::INFINITY)), t),
            mean_nullity: mean(results.iter().map(|(_, r)| r.nullity as f64), t),
            zero_fraction: results.iter().filter(|(_, r)| r.x.is_zero()).count() as f64 / t as f64,
            exact_checked,
            exact_held,
            master_seed: cfg.seed,
        });
        for (i, (seed, r)) in results.into_iter().enumerate() {
            let mut row = TrialRow::new(&p, i as u64, seed);
            row.nullity = Some(r.nullity);
            row.critical_sets = Some(r.x.to_string());
            trials.push(row);
        }
    }
    Ok((rows, trials))
}

/// Core sizes of unconstrained instances against the limiting fractions.
pub fn run_core_check(cfg: &ExperimentConfig) -> Result<(Vec<CoreRow>, Vec<TrialRow>)> {
    cfg.validate()?;
    let pool = pool(cfg.workers)?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for p in cfg.points() {
        let results = run_trials(&pool, cfg, &p, |seed| {
            let inst = gen_unconstrained(cfg.k, p.m, cfg.n, seed)?;
            Ok(crate::peel::core_density(&inst)?)
        })?;
        let t = cfg.trials;
        let n = cfg.n as f64;
        let (pv, pe) = core_sizes(cfg.k, p.c)?;
        let predicted_ratio = match mu_of(cfg.k, p.c)? {
            Some(mu) => Some(psi(mu)? / cfg.k as f64),
            None => None,
        };
        let ratios: Vec<f64> = results.iter().filter_map(|(_, s)| s.ratio).collect();
        rows.push(CoreRow {
            point: p.index,
            c: p.c,
            n: cfg.n,
            m: p.m,
            trials: t,
            mean_vars_frac: mean(results.iter().map(|(_, s)| s.core_vars as f64 / n), t),
            mean_eqs_frac: mean(results.iter().map(|(_, s)| s.core_eqs as f64 / n), t),
            predicted_vars_frac: pv,
            predicted_eqs_frac: pe,
            mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
            predicted_ratio,
            empty_cores: results.iter().filter(|(_, s)| s.is_empty()).count() as u64,
            master_seed: cfg.seed,
        });
        for (i, (seed, s)) in results.into_iter().enumerate() {
            let mut row = TrialRow::new(&p, i as u64, seed);
            row.core_vars = Some(s.core_vars);
            row.core_eqs = Some(s.core_eqs);
            trials.push(row);
        }
    }
    Ok((rows, trials))
}

/// Collision statistics of the chip model against `γ`, `γ²` and `e^{-γ}`.
pub fn run_collision_check(cfg: &ExperimentConfig) -> Result<(Vec<CollisionRow>, Vec<TrialRow>)> {
    cfg.validate()?;
    let pool = pool(cfg.workers)?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for p in cfg.points() {
        let sampler = CModelSampler::new(cfg.k, p.m, cfg.n, DegreeStrategy::default())?;
        let results = run_trials(&pool, cfg, &p, |seed| Ok(collision_count(&sampler.sample(&mut seed.rng())?)))?;
        let t = cfg.trials;
        let g = sampler.gamma();
        rows.push(CollisionRow {
            point: p.index,
            k: cfg.k,
            n: cfg.n,
            m: p.m,
            samples: t,
            gamma: g,
            mean: mean(results.iter().map(|&(_, x)| x as f64), t),
            factorial2: mean(results.iter().map(|&(_, x)| (x * x.saturating_sub(1)) as f64), t),
            gamma_sq: g * g,
            accept_rate: results.iter().filter(|&&(_, x)| x == 0).count() as f64 / t as f64,
            exp_neg_gamma: (-g).exp(),
            master_seed: cfg.seed,
        });
        for (i, (seed, x)) in results.into_iter().enumerate() {
            let mut row = TrialRow::new(&p, i as u64, seed);
            row.collisions = Some(x);
            trials.push(row);
        }
    }
    Ok((rows, trials))
}

/// Satisfiability at `m = n ± w` for each window offset `w`.
pub fn run_window_check(cfg: &ExperimentConfig) -> Result<(Vec<WindowRow>, Vec<TrialRow>)> {
    cfg.validate()?;
    let (sweep, trials) = run_sat_sweep(cfg)?;
    let t = cfg.trials as f64;
    let points = cfg.points();
    let mut rows: Vec<WindowRow> = Vec::with_capacity(sweep.len());
    for (s, p) in sweep.iter().zip(&points) {
        let (envelope, envelope_gate, within) = if p.offset > 0 {
            let env = 1.0 - 2.0 * 2f64.powi(-(p.offset as i32));
            let sigma = (env * (1.0 - env) / t).sqrt();
            let gate = env - 3.0 * sigma;
            (Some(env), Some(gate), Some(1.0 - s.sat_fraction >= gate))
        } else {
            (None, None, None)
        };
        let monotone = match rows.last() {
            None => true,
            Some(prev) => {
                let pooled = (prev.sat_fraction + s.sat_fraction) / 2.0;
                let sigma = (2.0 * pooled * (1.0 - pooled) / t).sqrt();
                s.sat_fraction <= prev.sat_fraction + 2.0 * sigma
            }
        };
        rows.push(WindowRow {
            point: s.point,
            offset: p.offset,
            n: cfg.n,
            m: s.m,
            trials: s.trials,
            sat_count: s.sat_count,
            sat_fraction: s.sat_fraction,
            unsat_fraction: 1.0 - s.sat_fraction,
            envelope,
            envelope_gate,
            within_envelope: within,
            monotone,
            master_seed: cfg.seed,
        });
    }
    Ok((rows, trials))
}

/// Runs the configured campaign and evaluates its gates.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let (rows, trials) = match cfg.kind {
        ExperimentKind::SatSweep => run_sat_sweep(cfg).map(|(r, t)| (Rows::Sweep(r), t))?,
        ExperimentKind::CriticalCensus => run_critical_census(cfg).map(|(r, t)| (Rows::Census(r), t))?,
        ExperimentKind::CoreCheck => run_core_check(cfg).map(|(r, t)| (Rows::Core(r), t))?,
        ExperimentKind::CollisionCheck => run_collision_check(cfg).map(|(r, t)| (Rows::Collision(r), t))?,
        ExperimentKind::WindowCheck => run_window_check(cfg).map(|(r, t)| (Rows::Window(r), t))?,
    };
    let gates = evaluate_gates(&cfg.gates, &rows)?;
    Ok(ExperimentOutput {
        config: cfg.clone(),
        rows,
        trials,
        gates,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

impl ExperimentOutput {
    pub fn csv(&self) -> Result<String> {
        self.rows.to_csv()
    }

    pub fn trials_csv(&self) -> Result<String> {
        to_csv(&self.trials)
    }

    pub fn summary(&self) -> Result<Summary> {
        Ok(Summary {
            config: self.config.clone(),
            csv_hash: content_hash(self.csv()?.as_bytes()),
            trials_csv_hash: content_hash(self.trials_csv()?.as_bytes()),
            all_gates_pass: self.gates.iter().all(|g| g.pass),
            gates: self.gates.clone(),
        })
    }

    /// Writes `<out>.csv`, `<out>.trials.csv` and `<out>.json`; returns the paths.
    pub fn write(&self, out: &Path) -> Result<[PathBuf; 3]> {
        let csv_path = out.with_extension("csv");
        let trials_path = out.with_extension("trials.csv");
        let json_path = out.with_extension("json");
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&csv_path, self.csv()?)?;
        std::fs::write(&trials_path, self.trials_csv()?)?;
        std::fs::write(&json_path, serde_json::to_string_pretty(&self.summary()?)?)?;
        Ok([csv_path, trials_path, json_path])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, model: ModelTag) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            model,
            k: 3,
            n: 60,
            c_grid: vec![0.5, 0.8, 1.1],
            trials: 12,
            seed: 9,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(ExperimentKind::SatSweep, ModelTag::Unconstrained);
        assert!(c.validate().is_ok());
        c.c_grid = vec![0.8, 0.8];
        assert!(c.validate().is_err());
        c.c_grid = vec![0.8];
        c.trials = 0;
        assert!(c.validate().is_err());
        let core = cfg(ExperimentKind::CoreCheck, ModelTag::Constrained);
        assert!(core.validate().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn window_points() {
        let mut c = cfg(ExperimentKind::WindowCheck, ModelTag::Constrained);
        c.k = 4;
        c.n = 100;
        c.windows = vec![5, 2];
        let ms: Vec<usize> = c.points().iter().map(|p| p.m).collect();
        assert_eq!(ms, vec![95, 98, 102, 105]);
    }

    #[test]
    fn sweep_counts_and_worker_invariance() {
        let mut c = cfg(ExperimentKind::SatSweep, ModelTag::Unconstrained);
        let (rows, trials) = run_sat_sweep(&c).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(trials.len(), 36);
        assert!(rows.iter().all(|r| r.sat_count <= r.trials));
        // At c = 1.1 > 1 with all ranks at most n, unsatisfiable instances must appear.
        assert!(rows[2].sat_count < rows[2].trials);
        let csv1 = to_csv(&rows).unwrap();
        c.workers = 3;
        let (rows3, trials3) = run_sat_sweep(&c).unwrap();
        assert_eq!(csv1, to_csv(&rows3).unwrap());
        assert_eq!(to_csv(&trials).unwrap(), to_csv(&trials3).unwrap());
        assert!(!csv1.contains("wall_time"));
    }

    #[test]
    fn exact_ratio_full_rank() {
        // Identity rows: every b has exactly one solution.
        let inst = Instance::new(1, 6, (0..6).map(|i| vec![i]).collect(), vec![false; 6], ModelTag::Unconstrained).unwrap();
        let (ratio, total) = exact_moment_ratio(&inst).unwrap();
        assert_eq!(ratio, BigRational::one());
        assert_eq!(total, BigUint::from(64u32));
        let out = census_trial(&inst).unwrap();
        assert!(out.x.is_zero());
        assert_eq!(out.exact, Some(true));
    }

    #[test]
    fn census_identity_on_tiny_instances() {
        let mut c = cfg(ExperimentKind::CriticalCensus, ModelTag::Constrained);
        c.n = 6;
        c.c_grid = Vec::new();
        c.m_list = vec![4, 5, 6];
        c.trials = 20;
        let (rows, _) = run_critical_census(&c).unwrap();
        for r in &rows {
            assert_eq!(r.exact_checked, r.trials);
            assert_eq!(r.exact_held, r.trials);
        }
    }

    #[test]
    fn gates() {
        let rows = Rows::Collision(vec![CollisionRow {
            point: 0,
            k: 3,
            n: 10,
            m: 12,
            samples: 1,
            gamma: 2.0,
            mean: 2.05,
            factorial2: 4.0,
            gamma_sq: 4.0,
            accept_rate: 0.1,
            exp_neg_gamma: 0.135,
            master_seed: 1,
        }]);
        let g = |metric: &str, target: Target, tolerance: f64, relative: bool| Gate {
            metric: metric.into(),
            m: None,
            target,
            tolerance,
            relative,
        };
        let res = evaluate_gates(
            &[
                g("mean", Target::Column("gamma".into()), 0.05, true),
                g("accept_rate", Target::Column("exp_neg_gamma".into()), 0.15, true),
                g("factorial2", Target::Value(4.0), 0.0, false),
            ],
            &rows,
        )
        .unwrap();
        assert_eq!(res.iter().map(|r| r.pass).collect::<Vec<_>>(), vec![true, false, true]);
        let missing = Gate {
            m: Some(99),
            ..g("mean", Target::Value(1.0), 1.0, false)
        };
        assert!(evaluate_gates(&[missing], &rows).is_err());
    }

    #[test]
    fn writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::CoreCheck, ModelTag::Unconstrained);
        c.trials = 3;
        let out = run_experiment(&c).unwrap();
        let paths = out.write(&dir.path().join("core")).unwrap();
        for p in &paths {
            assert!(p.exists());
        }
        let summary: Summary = serde_json::from_str(&std::fs::read_to_string(&paths[2]).unwrap()).unwrap();
        assert_eq!(summary.csv_hash, content_hash(std::fs::read(&paths[0]).unwrap().as_slice()));
    }

    #[test]
    fn hash_distinguishes_inputs() {
        assert_eq!(content_hash(b"").len(), 64);
        assert_ne!(content_hash(b"a"), content_hash(b"b"));
    }
}
