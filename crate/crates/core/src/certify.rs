//! Interval certificates for the negativity claims behind the threshold.
//!
//! A [`Certificate`] is a list of cells. Each cell names a [`Check`] (what to
//! evaluate), a domain, the bound that was obtained, and the relation it must
//! satisfy against a target. [`replay`] recomputes every bound from scratch and
//! re-checks that the cells marked as a cover leave no gaps, so a stored
//! certificate can be audited without repeating any search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interval::Interval;
use crate::thresholds::{alpha_k, h_k_at, lambda_of, psi, ZetaChoice};

/// Right end of the medium range of `α`.
pub const AMED_RIGHT: f64 = 0.2743;
/// `x₀ = 1 - 2 · 0.2743`.
pub const X0: f64 = 0.4514;
/// Most cells any adaptive cover may use.
pub const CELL_BUDGET: usize = 100_000;
/// Step of the `α` and `ζ` grids in the `k = 3` certificate.
pub const K3_STEP: f64 = 0.001;
/// Target for the `k = 3` grid.
pub const K3_TARGET: f64 = -0.002;
/// Slack allowed at a degenerate endpoint where the certified expression is 0.
pub const ENDPOINT_SLACK: f64 = 1e-15;
const MAX_C_DEPTH: u32 = 12;

/// How a cell's bound must compare with its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Upper bound strictly below the target.
    Lt,
    /// Upper bound at most the target.
    Le,
    /// Lower bound strictly above the target.
    Gt,
    /// Lower bound at least the target.
    Ge,
}

impl Relation {
    fn holds(self, bound: f64, target: f64) -> bool {
        match self {
            Relation::Lt => bound < target,
            Relation::Le => bound <= target,
            Relation::Gt => bound > target,
            Relation::Ge => bound >= target,
        }
    }

    fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le)
    }
}

/// The quantity bounded on a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// Upper bound of `s_k` over the `α` domain.
    SkUpper { k: usize },
    /// Upper bound of `H_k(α, ζ; c)` over the `α` domain and `c ∈ [c_lo, c_hi]`,
    /// the `c` range split into `2^c_depth` equal pieces.
    HkUpper { k: usize, c_lo: f64, c_hi: f64, c_depth: u32 },
    /// Upper bound of `(H_k(α, (α, ᾱ); c) + x²/15) / x²` over `x = 1 - 2α` in the domain.
    KeyCaseUpper { k: usize, c: f64 },
    /// Upper bound of `d²/dx² [H(½ - x/2) - ln(4/(x²+2))]`.
    EntropyCurvatureUpper,
    /// Upper bound of `H(½ - x/2) - ln(4/(x²+2))`.
    EntropyGapUpper,
    /// Upper bound of `R(λ, x)` at the point domain `x`.
    RUpper { lambda: f64 },
    /// Bounds of `ψ` at the point domain.
    PsiUpper,
    PsiLower,
    /// Upper bound of the natural entropy `H` at the point domain.
    EntropyUpper,
    /// Upper bound of `ln(½ + ½e^{-t})` at the point domain `t`.
    LnHalfExpUpper,
    /// Lower bound of `ln(4/(x²+2))` at the point domain `x`.
    LnFourOverLower,
    /// Upper bound of `(3.3992/4) ln(4/(x²+2)) + ln(½ + ½x²)` at the point domain.
    SmallLambdaCaseUpper,
    /// Lower bound of `e^x + e^{-x} - 2 - x²`.
    PsiNumeratorLower,
    /// Lower bound of `(s - 2)e^s + s + 2`.
    RSlopeLower,
    /// Lower bound of `e^{x²/2} - cosh x`.
    CoshGapLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    pub check: Check,
    pub domain: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaChoice>,
    pub bound: f64,
    pub target: f64,
    pub relation: Relation,
}

impl Cell {
    fn holds(&self) -> bool {
        self.relation.holds(self.bound, self.target)
    }

    /// Signed distance to failure: negative when the cell holds with room.
    pub fn margin(&self) -> f64 {
        if self.relation.is_upper() {
            self.bound - self.target
        } else {
            self.target - self.bound
        }
    }
}

/// A range that the cells carrying `label` must cover without gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub label: String,
    pub range: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case")]
pub enum Claim {
    /// `s_k < target` on `[left, 0.2743]`.
    Amed { k: usize, target: f64 },
    /// `s_k < target` on caller-chosen cells.
    SkCells { k: usize, target: f64 },
    /// `s_k < -0.1` on `[1/7, 1/6]` for `k = 7`, plus the two constants.
    AmedInduction,
    /// `H_3(α, ζ(α); c) < -0.002` for `α ∈ [0.099, 0.400]` and `c` in the range.
    K3Grid { c_lo: f64, c_hi: f64 },
    AlargeConstants,
    Monotonicity,
}

impl Claim {
    pub fn id(&self) -> String {
        match self {
            Claim::Amed { k, .. } => format!("amed-k{k}"),
            Claim::SkCells { k, .. } => format!("sk-cells-k{k}"),
            Claim::AmedInduction => "amed-induction".into(),
            Claim::K3Grid { .. } => "k3-grid".into(),
            Claim::AlargeConstants => "alarge-constants".into(),
            Claim::Monotonicity => "monotonicity".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim_id: String,
    pub claim: Claim,
    pub cells: Vec<Cell>,
    pub covers: Vec<CoverSpec>,
    /// Largest upper bound (or smallest lower bound) when all cells share one
    /// relation direction; otherwise absent.
    pub global_bound: Option<f64>,
    /// Largest cell margin; negative means every cell holds with room.
    pub worst_margin: f64,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl Certificate {
    fn assemble(claim: Claim, cells: Vec<Cell>, covers: Vec<CoverSpec>, mut failure: Option<String>) -> Self {
        let worst_margin = cells.iter().map(Cell::margin).fold(f64::NEG_INFINITY, f64::max);
        let upper = cells.iter().all(|c| c.relation.is_upper());
        let lower = cells.iter().all(|c| !c.relation.is_upper());
        let global_bound = if cells.is_empty() {
            None
        } else if upper {
            Some(cells.iter().map(|c| c.bound).fold(f64::NEG_INFINITY, f64::max))
        } else if lower {
            Some(cells.iter().map(|c| c.bound).fold(f64::INFINITY, f64::min))
        } else {
            None
        };
        if failure.is_none() {
            if let Some(bad) = cells.iter().find(|c| !c.holds()) {
                failure = Some(format!(
                    "cell {} on {} has bound {:e} against target {:e}",
                    bad.label, bad.domain, bad.bound, bad.target
                ));
            }
        }
        if failure.is_none() {
            failure = cover_gap(&cells, &covers);
        }
        Self {
            claim_id: claim.id(),
            claim,
            cells,
            covers,
            global_bound,
            worst_margin,
            verified: failure.is_none(),
            failure,
        }
    }

    /// `(interval, certified bound, ζ)` for the cells of the `alpha` cover.
    pub fn alpha_cover(&self) -> Vec<(Interval, f64, Option<ZetaChoice>)> {
        self.cells_labelled("alpha").map(|c| (c.domain, c.bound, c.zeta)).collect()
    }

    /// Cells whose label matches.
    pub fn cells_labelled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Cell> + 'a {
        self.cells.iter().filter(move |c| c.label == label)
    }
}

fn cover_gap(cells: &[Cell], covers: &[CoverSpec]) -> Option<String> {
    for spec in covers {
        let mut doms: Vec<Interval> = cells.iter().filter(|c| c.label == spec.label).map(|c| c.domain).collect();
        doms.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let Some(first) = doms.first() else {
            return Some(format!("cover {} has no cells", spec.label));
        };
        if first.lo > spec.range.lo {
            return Some(format!("cover {} starts at {} after {}", spec.label, first.lo, spec.range.lo));
        }
        let mut reach = first.hi;
        for d in &doms[1..] {
            if d.lo > reach {
                return Some(format!("cover {} has a gap ({reach}, {})", spec.label, d.lo));
            }
            reach = reach.max(d.hi);
        }
        if reach < spec.range.hi {
            return Some(format!("cover {} ends at {reach} before {}", spec.label, spec.range.hi));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Interval building blocks.

fn pt(x: f64) -> Interval {
    Interval::point(x)
}

fn ln2() -> Interval {
    pt(2.0).ln()
}

/// Enclosure of `H(p)` for `p ∈ [0, 1]`.
pub fn entropy_interval(p: Interval) -> Interval {
    let q = pt(1.0) - p;
    -(p.clamp_below(0.0).xlnx() + q.clamp_below(0.0).xlnx())
}

/// `ln(½ + ½e^{-t}) = ln(1 + e^{-t}) - ln 2`.
fn ln_half_exp(t: Interval) -> Interval {
    (-t).exp().ln_1p() - ln2()
}

/// Enclosure of `s_k` over an `α` interval inside `[0, ½]`, by monotone split:
/// `H` increases there and `ln(½ + ½e^{-2kα})` decreases.
pub fn interval_s_k(k: usize, a: Interval) -> Result<Interval> {
    if a.lo < 0.0 || a.hi > 0.5 {
        return Err(invalid(format!("interval_s_k needs a subset of [0, 1/2], got {a}")));
    }
    let two_k = pt(2.0 * k as f64);
    let upper = pt(entropy_interval(pt(a.hi)).hi) + ln_half_exp(two_k * pt(a.lo));
    let lower = pt(entropy_interval(pt(a.lo)).lo) + ln_half_exp(two_k * pt(a.hi));
    Ok(Interval {
        lo: lower.lo,
        hi: upper.hi,
    })
}

/// Enclosure of `ψ` at a point, as `x f'(x) / f(x)`.
fn psi_point(x: f64) -> Interval {
    if x == 0.0 {
        return pt(2.0);
    }
    let p = pt(x);
    p * p.expm1() / p.f()
}

/// Enclosure of `ψ` over an interval in `[0, ∞)` (ψ is increasing).
pub fn psi_interval(x: Interval) -> Interval {
    Interval {
        lo: psi_point(x.lo).lo,
        hi: psi_point(x.hi).hi,
    }
}

/// An interval certified to contain `ψ⁻¹(d)` for every `d` in `ds`.
pub fn certified_lambda(ds: Interval) -> Result<Interval> {
    let lo = lambda_of(ds.lo)? - 1e-9;
    let hi = lambda_of(ds.hi)? + 1e-9;
    if !(psi_point(lo).hi < ds.lo && psi_point(hi).lo > ds.hi) {
        return Err(invalid(format!("could not bracket lambda for d in {ds}")));
    }
    Ok(Interval { lo, hi })
}

/// `R(λ, x) = f(λx) / (x² f(λ))` for `x > 0`.
pub fn r_interval(lambda: Interval, x: Interval) -> Interval {
    (lambda * x).f() / (x.sqr() * lambda.f())
}

/// `ln[(f(λ(ζ₂+ζ₁)) + f(λ(ζ₂-ζ₁))) / (2 f(λ))]`.
fn parity_term(lambda: Interval, z: ZetaChoice) -> Interval {
    let sum = pt(z.zeta2) + pt(z.zeta1);
    let diff = pt(z.zeta2) - pt(z.zeta1);
    let num = (lambda * sum).f() + (lambda * diff).f();
    (num / (pt(2.0) * lambda.f())).ln()
}

/// `H(α) + k(α ln(α/ζ₁) + ᾱ ln(ᾱ/ζ₂))` at a point `α ∈ (0, 1)`.
fn linear_in_c_part(alpha: f64, z: ZetaChoice, k: usize) -> Interval {
    let a = pt(alpha);
    let abar = pt(1.0) - a;
    let t1 = a * (a / pt(z.zeta1)).ln();
    let t2 = abar * (abar / pt(z.zeta2)).ln();
    entropy_interval(a) + pt(k as f64) * (t1 + t2)
}

/// Enclosure of `H_k(α, ζ; c)` over the box `α × c`, with `λ = ψ⁻¹(ck)`
/// bracketed. For fixed `c` the function is convex in `α`, so the upper end
/// is the larger of the two `α` endpoints; the lower end is the natural
/// interval extension, since the minimum may lie inside the box.
pub fn interval_h_k(alpha: Interval, zeta: ZetaChoice, c: Interval, k: usize) -> Result<Interval> {
    if !(alpha.lo > 0.0 && alpha.hi < 1.0) {
        return Err(invalid(format!("interval_h_k needs alpha inside (0,1), got {alpha}")));
    }
    let lambda = certified_lambda(c * pt(k as f64))?;
    let parity = parity_term(lambda, zeta);
    let at = |a: f64| c * linear_in_c_part(a, zeta, k) + parity;
    let (left, right) = (at(alpha.lo), at(alpha.hi));
    let abar = pt(1.0) - alpha;
    let t1 = alpha * (alpha / pt(zeta.zeta1)).ln();
    let t2 = abar * (abar / pt(zeta.zeta2)).ln();
    let natural = c * (entropy_interval(alpha) + pt(k as f64) * (t1 + t2)) + parity;
    Ok(Interval {
        lo: natural.lo,
        hi: left.hi.max(right.hi).min(natural.hi),
    })
}

fn hk_upper(k: usize, alpha: Interval, zeta: ZetaChoice, c_lo: f64, c_hi: f64, depth: u32) -> Result<f64> {
    let pieces = 1u64 << depth;
    let width = (c_hi - c_lo) / pieces as f64;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..pieces {
        let lo = if i == 0 { c_lo } else { c_lo + width * i as f64 };
        let hi = if i + 1 == pieces { c_hi } else { c_lo + width * (i + 1) as f64 };
        // Neighbouring pieces overlap by the rounding of `lo`/`hi`; widen by
        // one ulp so no value of c falls between them.
        let piece = Interval {
            lo: lo.next_down().max(c_lo),
            hi: hi.next_up().min(c_hi),
        };
        worst = worst.max(interval_h_k(alpha, zeta, piece, k)?.hi);
    }
    Ok(worst)
}

/// `Σ_{j≥1} x^{2j-2} / (2j(2j-1))`, bounded below by its first two terms.
fn entropy_series_lower(x_lo: f64) -> f64 {
    (pt(0.5) + pt(x_lo).sqr() / pt(12.0)).lo
}

fn keycase_upper(k: usize, c: f64, x: Interval) -> Result<f64> {
    if c != 1.0 {
        // The reduced form below uses c H(α) = H(α).
        return Err(invalid("key case is certified at c = 1 only"));
    }
    if !(x.lo >= 0.0 && x.hi > 0.0 && x.hi <= 1.0) {
        return Err(invalid(format!("key case needs x in [0, 1], got {x}")));
    }
    let lambda = certified_lambda(pt(c * k as f64))?;
    // With u = x² R(λ, x):  H_k / x² = R · ln(1+u)/u - Σ_j x^{2j-2}/(2j(2j-1)).
    // R increases in x, so R(λ, x_hi) bounds it above on the cell.
    let r_hi = r_interval(lambda, pt(x.hi)).hi;
    let r_lo = if x.lo > 0.0 {
        r_interval(lambda, pt(x.lo)).lo.max(0.0)
    } else {
        0.0
    };
    let u_lo = (pt(x.lo).sqr() * pt(r_lo)).lo.max(0.0);
    let g_hi = pt(u_lo).ln_1p_over().hi;
    let bound = pt(r_hi) * pt(g_hi) - pt(entropy_series_lower(x.lo)) + pt(1.0) / pt(15.0);
    Ok(bound.hi)
}

fn entropy_curvature_upper(x: Interval) -> Result<f64> {
    if !(x.lo >= 0.0 && x.hi < 1.0) {
        return Err(invalid(format!("curvature form needs x in [0, 1), got {x}")));
    }
    let x2 = x.sqr();
    let num = (x2 * (pt(10.0) - x2)).clamp_below(0.0);
    let den = (x2 + 2.0).sqr() * (pt(1.0) - x2);
    let q = (num / den).clamp_below(0.0);
    Ok(-q.lo)
}

fn entropy_gap_upper(x: Interval) -> Result<f64> {
    if !(x.lo >= 0.0 && x.hi <= 1.0) {
        return Err(invalid(format!("entropy bound needs x in [0, 1], got {x}")));
    }
    // H(½ - x/2) decreases in x; so does ln(4/(x²+2)).
    let p = pt(0.5) - pt(x.lo) * 0.5;
    let h_hi = entropy_interval(pt(p.hi.min(0.5))).hi;
    let rhs_lo = (pt(4.0) / (pt(x.hi).sqr() + 2.0)).ln().lo;
    Ok((pt(h_hi) - pt(rhs_lo)).hi)
}

fn psi_numerator_lower(x: Interval) -> f64 {
    if x.hi <= 1.0 {
        // 2 Σ_{j≥2} x^{2j}/(2j)!, every term nonnegative.
        let a = pt(x.lo);
        (pt(2.0) * (a.powi(4) / pt(24.0) + a.powi(6) / pt(720.0))).lo.max(0.0)
    } else {
        (pt(x.lo).exp() + (-pt(x.hi)).exp() - 2.0 - pt(x.hi).sqr()).lo
    }
}

fn r_slope_lower(s: Interval) -> f64 {
    if s.hi <= 1.0 {
        // Σ_{n≥3} (n-2) sⁿ/n!, every term nonnegative.
        let a = pt(s.lo);
        (a.powi(3) / pt(6.0) + pt(2.0) * a.powi(4) / pt(24.0)).lo.max(0.0)
    } else {
        // Increasing for s ≥ 1: derivative (s-1)e^s + 1 > 0.
        let a = pt(s.lo);
        ((a - 2.0) * a.exp() + a + 2.0).lo
    }
}

fn cosh_gap_lower(x: Interval) -> f64 {
    if x.hi <= 1.0 {
        // Σ_{j≥2} x^{2j} (1/(2^j j!) - 1/(2j)!), every term nonnegative.
        (pt(x.lo).powi(4) / pt(12.0)).lo.max(0.0)
    } else {
        ((pt(x.lo).sqr() * 0.5).exp() - pt(x.hi).cosh()).lo
    }
}

/// Re-evaluates the bound of one cell.
pub fn evaluate(check: Check, domain: Interval, zeta: Option<ZetaChoice>) -> Result<f64> {
    let need_zeta = || zeta.ok_or_else(|| invalid("cell needs a zeta"));
    Ok(match check {
        Check::SkUpper { k } => interval_s_k(k, domain)?.hi,
        Check::HkUpper { k, c_lo, c_hi, c_depth } => hk_upper(k, domain, need_zeta()?, c_lo, c_hi, c_depth)?,
        Check::KeyCaseUpper { k, c } => keycase_upper(k, c, domain)?,
        Check::EntropyCurvatureUpper => entropy_curvature_upper(domain)?,
        Check::EntropyGapUpper => entropy_gap_upper(domain)?,
        Check::RUpper { lambda } => r_interval(pt(lambda), domain).hi,
        Check::PsiUpper => psi_interval(domain).hi,
        Check::PsiLower => psi_interval(domain).lo,
        Check::EntropyUpper => entropy_interval(domain).hi,
        Check::LnHalfExpUpper => ln_half_exp(domain).hi,
        Check::LnFourOverLower => (pt(4.0) / (domain.sqr() + 2.0)).ln().lo,
        Check::SmallLambdaCaseUpper => {
            let x2 = domain.sqr();
            let a = pt(3.3992) / pt(4.0) * (pt(4.0) / (x2 + 2.0)).ln();
            let b = (pt(0.5) + x2 * 0.5).ln();
            (a + b).hi
        }
        Check::PsiNumeratorLower => psi_numerator_lower(domain),
        Check::RSlopeLower => r_slope_lower(domain),
        Check::CoshGapLower => cosh_gap_lower(domain),
    })
}

fn make_cell(
    label: &str,
    check: Check,
    domain: Interval,
    zeta: Option<ZetaChoice>,
    target: f64,
    relation: Relation,
) -> Result<Cell> {
    Ok(Cell {
        label: label.to_string(),
        check,
        domain,
        zeta,
        bound: evaluate(check, domain, zeta)?,
        target,
        relation,
    })
}

/// Recomputes every cell and every cover of a stored certificate.
pub fn replay(cert: &Certificate) -> Result<Certificate> {
    let cells = cert
        .cells
        .iter()
        .map(|c| make_cell(&c.label, c.check, c.domain, c.zeta, c.target, c.relation))
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::assemble(cert.claim.clone(), cells, cert.covers.clone(), None))
}

// ---------------------------------------------------------------------------
// Claims.

/// Left end of the medium range: `0.99 α_k` rounded down to four decimals.
pub fn amed_left(k: usize) -> Result<f64> {
    let raw = 0.99 * alpha_k(k)?;
    Ok((raw * 1e4).floor() / 1e4)
}

/// Greedy cover of `[lo, hi]`: from the current left end take the widest
/// cell (doubling, then halving) whose certified bound meets the target.
fn greedy_cover(
    lo: f64,
    hi: f64,
    mut eval: impl FnMut(Interval) -> Result<f64>,
    holds: impl Fn(f64) -> bool,
) -> Result<(Vec<(Interval, f64)>, Option<String>)> {
    let mut cells = Vec::new();
    let mut a = lo;
    let mut width = (hi - lo) / 2.0;
    while a < hi {
        if cells.len() >= CELL_BUDGET {
            return Ok((cells, Some(format!("cell budget {CELL_BUDGET} exhausted at {a}"))));
        }
        width = (width * 2.0).min(hi - a);
        loop {
            let b = if a + width >= hi { hi } else { a + width };
            let dom = Interval { lo: a, hi: b };
            let bound = eval(dom)?;
            if holds(bound) {
                cells.push((dom, bound));
                a = b;
                break;
            }
            width *= 0.5;
            if width < 1e-13 {
                cells.push((dom, bound));
                return Ok((cells, Some(format!("cannot certify near {a}"))));
            }
        }
    }
    Ok((cells, None))
}

/// `s_k(α) < target` on `[amed_left(k), 0.2743]` by a greedy adaptive cover.
pub fn certify_amed(k: usize, target: f64) -> Result<Certificate> {
    if k < 4 {
        return Err(invalid(format!("certify_amed needs k >= 4, got {k}")));
    }
    let left = amed_left(k)?;
    let check = Check::SkUpper { k };
    let (found, failure) = greedy_cover(left, AMED_RIGHT, |d| evaluate(check, d, None), |b| b < target)?;
    let label = "alpha";
    let cells = found
        .into_iter()
        .map(|(domain, bound)| Cell {
            label: label.into(),
            check,
            domain,
            zeta: None,
            bound,
            target,
            relation: Relation::Lt,
        })
        .collect();
    let covers = vec![CoverSpec {
        label: label.into(),
        range: Interval { lo: left, hi: AMED_RIGHT },
    }];
    Ok(Certificate::assemble(Claim::Amed { k, target }, cells, covers, failure))
}

/// `s_k(α) < target` on the given cells (no cover requirement).
pub fn certify_s_k_cells(k: usize, cells: &[(f64, f64)], target: f64) -> Result<Certificate> {
    let out = cells
        .iter()
        .map(|&(a, b)| make_cell("alpha", Check::SkUpper { k }, Interval::new(a, b)?, None, target, Relation::Lt))
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::assemble(Claim::SkCells { k, target }, out, Vec::new(), None))
}

/// The induction range: `s_7 < -0.1` on `[1/7, 1/6]`, with `H(1/6) < 0.451`
/// and `ln(½ + ½e^{-2}) < -0.566`.
pub fn certify_amed_induction() -> Result<Certificate> {
    let dom = Interval {
        lo: (1.0f64 / 7.0).next_down(),
        hi: (1.0f64 / 6.0).next_up(),
    };
    let cells = vec![
        make_cell("s7", Check::SkUpper { k: 7 }, dom, None, -0.1, Relation::Lt)?,
        make_cell("entropy", Check::EntropyUpper, pt(dom.hi), None, 0.451, Relation::Lt)?,
        make_cell("half-exp", Check::LnHalfExpUpper, pt(2.0), None, -0.566, Relation::Lt)?,
    ];
    Ok(Certificate::assemble(Claim::AmedInduction, cells, Vec::new(), None))
}

fn k3_alpha_cells() -> Vec<Interval> {
    (0..301)
        .map(|i| Interval {
            lo: (99 + i) as f64 / 1000.0,
            hi: (100 + i) as f64 / 1000.0,
        })
        .collect()
}

fn grid_value(i: i64) -> f64 {
    i as f64 / 1000.0
}

/// Point objective used to choose `ζ`: worst of `H_3` at the cell's corners.
fn k3_objective(alpha: Interval, z: ZetaChoice, corners: &[(f64, f64)]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for &(c, lambda) in corners {
        for a in [alpha.lo, alpha.hi] {
            worst = worst.max(h_k_at(a, z, c, 3, lambda));
        }
    }
    worst
}

/// Grid search for `ζ` on multiples of 0.001: a coarse scan at step 0.01,
/// then coordinate pattern search at step 0.001.
pub fn search_k3_zeta(alpha: Interval, c_lo: f64, c_hi: f64) -> Result<ZetaChoice> {
    let corners = [(c_lo, lambda_of(3.0 * c_lo)?), (c_hi, lambda_of(3.0 * c_hi)?)];
    let score = |i: i64, j: i64| k3_objective(alpha, ZetaChoice::new(grid_value(i), grid_value(j)), &corners);
    let mut best = (10i64, 10i64, f64::INFINITY);
    for i in (10..=1000).step_by(10) {
        for j in (10..=1500).step_by(10) {
            let s = score(i, j);
            if s < best.2 {
                best = (i, j, s);
            }
        }
    }
    loop {
        let (i0, j0, s0) = best;
        let mut next = best;
        for di in -1..=1 {
            for dj in -1..=1 {
                let (i, j) = (i0 + di, j0 + dj);
                if i < 1 || j < 1 || (di == 0 && dj == 0) {
                    continue;
                }
                let s = score(i, j);
                if s < next.2 {
                    next = (i, j, s);
                }
            }
        }
        if next.2 >= s0 {
            break;
        }
        best = next;
    }
    Ok(ZetaChoice::new(grid_value(best.0), grid_value(best.1)))
}

/// Certifies one `α` cell with a given `ζ`, splitting the `c` range until the
/// bound meets the target.
pub fn certify_k3_cell(alpha: Interval, zeta: ZetaChoice, c_lo: f64, c_hi: f64) -> Result<Cell> {
    let mut cell = None;
    for depth in 0..=MAX_C_DEPTH {
        let check = Check::HkUpper {
            k: 3,
            c_lo,
            c_hi,
            c_depth: depth,
        };
        let c = make_cell("alpha", check, alpha, Some(zeta), K3_TARGET, Relation::Lt)?;
        let done = c.holds();
        cell = Some(c);
        if done {
            break;
        }
    }
    Ok(cell.expect("at least one depth"))
}

/// `H_3(α, ζ; c) < -0.002` for every `α ∈ [0.099, 0.400]` and `c ∈ c_range`,
/// with one grid `ζ` per `α` cell of width 0.001.
pub fn certify_k3_grid(c_range: Interval) -> Result<Certificate> {
    if !(c_range.lo >= 0.99 && c_range.hi <= 1.01 && c_range.width() <= 0.02 + 1e-12) {
        return Err(invalid(format!("c range must lie in [0.99, 1.01] with width <= 0.02, got {c_range}")));
    }
    let (c_lo, c_hi) = (c_range.lo, c_range.hi);
    let cells = k3_alpha_cells()
        .into_par_iter()
        .map(|alpha| {
            let zeta = search_k3_zeta(alpha, c_lo, c_hi)?;
            certify_k3_cell(alpha, zeta, c_lo, c_hi)
        })
        .collect::<Result<Vec<_>>>()?;
    let covers = vec![CoverSpec {
        label: "alpha".into(),
        range: Interval { lo: 0.099, hi: 0.400 },
    }];
    Ok(Certificate::assemble(Claim::K3Grid { c_lo, c_hi }, cells, covers, None))
}

/// The constants of the large-`α` range and the `c = 1` key case.
pub fn certify_alarge_constants() -> Result<Certificate> {
    let mut cells = vec![
        make_cell("R(2.7694,x0)", Check::RUpper { lambda: 2.7694 }, pt(X0), None, 0.5, Relation::Lt)?,
        make_cell("R(3.5,x0)", Check::RUpper { lambda: 3.5 }, pt(X0), None, 0.4, Relation::Lt)?,
        make_cell("R(2.149,0.2)", Check::RUpper { lambda: 2.149 }, pt(0.2), None, 0.495, Relation::Le)?,
        make_cell("psi(2.7694)<=", Check::PsiUpper, pt(2.7694), None, 3.3992, Relation::Le)?,
        make_cell("psi(2.7694)>", Check::PsiLower, pt(2.7694), None, 3.39, Relation::Gt)?,
        make_cell("psi(2.149)", Check::PsiUpper, pt(2.149), None, 3.0, Relation::Lt)?,
        make_cell("ln(4/(x0^2+2))", Check::LnFourOverLower, pt(X0), None, 0.59, Relation::Gt)?,
        make_cell("small-lambda case", Check::SmallLambdaCaseUpper, pt(X0), None, -0.0011, Relation::Lt)?,
    ];
    // λ(4) > 3.5, so the key case sits in the range where R(3.5, x0) applies.
    let lambda4 = certified_lambda(pt(4.0))?;
    cells.push(make_cell("psi(3.5)<4", Check::PsiUpper, pt(3.5), None, 4.0, Relation::Lt)?);
    debug_assert!(lambda4.lo > 3.5);

    let step = 0.002;
    let n_key = (X0 / step).ceil() as usize;
    for i in 0..n_key {
        let lo = i as f64 * step;
        let hi = if i + 1 == n_key { X0 } else { (i + 1) as f64 * step };
        let check = Check::KeyCaseUpper { k: 4, c: 1.0 };
        cells.push(make_cell("keycase", check, Interval { lo, hi }, None, 0.0, Relation::Le)?);
    }
    let n_ent = 500;
    for i in 0..n_ent {
        let lo = i as f64 * step;
        let hi = (i + 1) as f64 * step;
        let dom = Interval { lo, hi };
        let cell = if hi <= 0.5 {
            make_cell("entropy-bound", Check::EntropyCurvatureUpper, dom, None, 0.0, Relation::Le)?
        } else {
            make_cell("entropy-bound", Check::EntropyGapUpper, dom, None, 0.0, Relation::Lt)?
        };
        cells.push(cell);
    }
    let covers = vec![
        CoverSpec {
            label: "keycase".into(),
            range: Interval { lo: 0.0, hi: X0 },
        },
        CoverSpec {
            label: "entropy-bound".into(),
            range: Interval { lo: 0.0, hi: 1.0 },
        },
    ];
    Ok(Certificate::assemble(Claim::AlargeConstants, cells, covers, None))
}

fn bisection_cover(
    label: &str,
    check: Check,
    range: Interval,
    initial: f64,
    cells: &mut Vec<Cell>,
) -> Result<Option<String>> {
    let mut stack: Vec<Interval> = Vec::new();
    let pieces = (range.width() / initial).ceil() as usize;
    for i in (0..pieces).rev() {
        let lo = range.lo + i as f64 * initial;
        let hi = if i + 1 == pieces { range.hi } else { range.lo + (i + 1) as f64 * initial };
        stack.push(Interval { lo, hi });
    }
    let mut produced = 0usize;
    while let Some(dom) = stack.pop() {
        let target = if dom.lo == 0.0 { -ENDPOINT_SLACK } else { 0.0 };
        let cell = make_cell(label, check, dom, None, target, Relation::Ge)?;
        if cell.holds() {
            cells.push(cell);
            produced += 1;
            continue;
        }
        if produced + stack.len() >= CELL_BUDGET || dom.width() < 1e-12 {
            cells.push(cell);
            return Ok(Some(format!("{label}: cannot certify on {dom}")));
        }
        let (l, r) = dom.bisect();
        stack.push(r);
        stack.push(l);
    }
    Ok(None)
}

/// Sign conditions: `e^x + e^{-x} - 2 - x² ≥ 0` and `(s-2)e^s + s + 2 ≥ 0` on
/// `[0, 20]`, and `cosh x ≤ e^{x²/2}` on `[0, 10]`.
pub fn certify_monotonicity() -> Result<Certificate> {
    let mut cells = Vec::new();
    let mut failure = None;
    let jobs = [
        ("psi-numerator", Check::PsiNumeratorLower, 20.0),
        ("r-slope", Check::RSlopeLower, 20.0),
        ("cosh-gap", Check::CoshGapLower, 10.0),
    ];
    let mut covers = Vec::new();
    for (label, check, end) in jobs {
        let range = Interval { lo: 0.0, hi: end };
        if let Some(f) = bisection_cover(label, check, range, 0.25, &mut cells)? {
            failure.get_or_insert(f);
        }
        covers.push(CoverSpec {
            label: label.into(),
            range,
        });
    }
    Ok(Certificate::assemble(Claim::Monotonicity, cells, covers, failure))
}

/// The scalar `ψ` used by the claim-checking CLI for display.
pub fn psi_value(x: f64) -> Result<f64> {
    psi(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::{entropy, h_k, r_ratio, s_k};
    use proptest::prelude::*;

    #[test]
    fn s4_point() {
        let b = interval_s_k(4, pt(0.2743)).unwrap();
        assert!(b.hi < 0.0);
        assert!((b.hi - (-1.49e-5)).abs() < 1e-6, "{b}");
        assert!(b.contains(s_k(4, 0.2743).unwrap()));
        assert!(interval_s_k(4, Interval { lo: 0.4, hi: 0.6 }).is_err());
    }

    #[test]
    fn split_point_cells() {
        let c5 = certify_s_k_cells(5, &[(0.1840, 0.2291), (0.2291, 0.2743)], -0.005).unwrap();
        assert!(c5.verified);
        let c6 = certify_s_k_cells(6, &[(0.1666, 0.2204), (0.2204, 0.2743)], -0.03).unwrap();
        assert!(c6.verified);
        assert!(c6.global_bound.unwrap() < -0.03);
    }

    #[test]
    fn amed_left_ends() {
        assert_eq!(amed_left(4).unwrap(), 0.1681);
        assert_eq!(amed_left(5).unwrap(), 0.184);
    }

    #[test]
    fn amed_small_covers() {
        let c = certify_amed(5, -0.005).unwrap();
        assert!(c.verified, "{:?}", c.failure);
        assert!(c.cells.len() <= 4);
        let bad = certify_amed(4, -1.0).unwrap();
        assert!(!bad.verified);
    }

    #[test]
    fn induction_range() {
        let c = certify_amed_induction().unwrap();
        assert!(c.verified, "{:?}", c.failure);
    }

    #[test]
    fn k3_reference_cell() {
        let alpha = Interval { lo: 0.300, hi: 0.301 };
        let cell = certify_k3_cell(alpha, ZetaChoice::new(0.360, 0.667), 0.999, 1.001).unwrap();
        assert!(cell.holds(), "{cell:?}");
        let zeta = search_k3_zeta(Interval { lo: 0.099, hi: 0.100 }, 0.999, 1.001).unwrap();
        let first = certify_k3_cell(Interval { lo: 0.099, hi: 0.100 }, zeta, 0.999, 1.001).unwrap();
        assert!(first.holds(), "{first:?}");
    }

    #[test]
    fn k3_range_checked() {
        assert!(certify_k3_grid(Interval { lo: 0.9, hi: 1.0 }).is_err());
    }

    #[test]
    fn replay_detects_tampering() {
        let mut c = certify_s_k_cells(5, &[(0.1840, 0.2291), (0.2291, 0.2743)], -0.005).unwrap();
        assert!(replay(&c).unwrap().verified);
        c.cells[0].target = -1.0;
        assert!(!replay(&c).unwrap().verified);
    }

    #[test]
    fn cover_gaps_detected() {
        let mut c = certify_amed(5, -0.005).unwrap();
        assert!(replay(&c).unwrap().verified);
        if c.cells.len() >= 2 {
            c.cells.remove(1);
        } else {
            c.cells[0].domain.hi -= 1e-3;
        }
        let r = replay(&c).unwrap();
        assert!(!r.verified);
        assert!(r.failure.unwrap().contains("cover"));
    }

    #[test]
    fn lambda_bracket() {
        let b = certified_lambda(pt(3.0)).unwrap();
        assert!(b.lo > 2.149 && b.hi < 2.151);
    }

    #[test]
    fn json_round_trip() {
        let c = certify_amed_induction().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn s_k_enclosure(a in 0.0f64..0.5, w in 0.0f64..0.05, t in 0.0f64..1.0, k in 3usize..9) {
            let hi = (a + w).min(0.5);
            let dom = Interval { lo: a, hi };
            let p = a + t * (hi - a);
            let e = interval_s_k(k, dom).unwrap();
            prop_assert!(e.contains(s_k(k, p).unwrap()), "{e} vs {}", s_k(k, p).unwrap());
        }

        #[test]
        fn h_k_enclosure(a in 0.05f64..0.95, w in 0.0f64..0.01, t in 0.0f64..1.0,
                         z1 in 0.05f64..1.0, z2 in 0.05f64..1.2, c in 0.9f64..1.1, cw in 0.0f64..0.01, s in 0.0f64..1.0,
                         k in 3usize..6) {
            let alpha = Interval { lo: a, hi: a + w };
            let cs = Interval { lo: c, hi: c + cw };
            let z = ZetaChoice::new(z1, z2);
            let pa = a + t * w;
            let pc = c + s * cw;
            let e = interval_h_k(alpha, z, cs, k).unwrap();
            let v = h_k(pa, z, pc, k).unwrap();
            prop_assert!(e.contains(v), "{e} vs {v}");
        }

        #[test]
        fn entropy_and_r_enclosure(p in 0.0f64..1.0, lambda in 0.1f64..20.0, x in 0.01f64..1.0) {
            prop_assert!(entropy_interval(pt(p)).contains(entropy(p).unwrap()));
            prop_assert!(r_interval(pt(lambda), pt(x)).contains(r_ratio(lambda, x).unwrap()));
            prop_assert!(psi_interval(pt(lambda)).contains(psi(lambda).unwrap()));
        }
    }
}
