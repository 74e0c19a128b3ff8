//! Command-line front end: gen, solve, peel, threshold, certify, experiment, plot.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use xorsat_lab::certify::{
    certify_alarge_constants, certify_amed, certify_amed_induction, certify_k3_grid, certify_monotonicity,
    certify_s_k_cells, replay, Certificate,
};
use xorsat_lab::instance::{gen_c_model, gen_constrained, gen_unconstrained, Instance, ModelTag};
use xorsat_lab::interval::Interval;
use xorsat_lab::lab::plot::{emit_plot, h_k_chart, h_k_csv, h_k_series};
use xorsat_lab::lab::{run_experiment, ExperimentConfig, ExperimentKind};
use xorsat_lab::peel::{core_instance, extend_solution, peel_trace, PeelOrder};
use xorsat_lab::rng::Seed;
use xorsat_lab::thresholds::ThresholdReport;
use xorsat_lab::{gf2, Error, Result};

#[derive(Parser)]
#[command(name = "xorsat-lab", version, about = "Random k-XORSAT laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random instance (unconstrained, constrained, or relaxed chip model).
    Gen(GenArgs),
    /// Solve an instance over GF(2): peel to the 2-core, eliminate, extend.
    Solve(SolveArgs),
    /// Peel an instance to its 2-core and report its order and size.
    Peel(PeelArgs),
    /// Threshold constants: lambda, gamma, alpha_k, c_hat, mu, c_star, core fractions.
    Threshold(ThresholdArgs),
    /// Build or replay an interval certificate; exit 0 iff verified.
    Certify(CertifyArgs),
    /// Run a Monte Carlo campaign and write CSV plus a JSON summary.
    Experiment(ExperimentArgs),
    /// Draw an SVG chart of a campaign CSV, or of H_k against alpha.
    Plot(PlotArgs),
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(long, default_value = "unconstrained", value_parser = parse_model)]
    model: ModelTag,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Number of equations; give this or --c.
    #[arg(long)]
    m: Option<usize>,
    /// Ratio m/n, rounded to the nearest m.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; `.xsat` writes the binary format, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SolveArgs {
    /// Instance file (JSON or binary).
    input: PathBuf,
    /// Write the solution as a 0/1 string.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PeelArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OrderArg::Fifo)]
    order: OrderArg,
    /// Write the core as an instance file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrderArg {
    Fifo,
    Lifo,
}

#[derive(Args, Serialize)]
struct ThresholdArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum ClaimArg {
    /// s_k < target on [0.99 alpha_k, 0.2743].
    Amed,
    /// s_k < target on the cells given by --split.
    SkCells,
    /// s_7 < -0.1 on [1/7, 1/6] and its two constants.
    AmedInduction,
    /// H_3 < -0.002 on alpha in [0.099, 0.400] for c in [c-lo, c-hi].
    K3Grid,
    /// Constant inequalities of the large-alpha range and the c = 1 key case.
    Alarge,
    /// Sign conditions behind monotonicity of psi and R, and cosh x <= e^{x^2/2}.
    Monotonicity,
}

#[derive(Args, Serialize)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    claim: Option<ClaimArg>,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Target for s_k claims; defaults to -1e-5 (k=4), -0.005 (k=5), -0.03 (k>=6).
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    /// Cell end points for sk-cells, e.g. 0.1840,0.2291,0.2743.
    #[arg(long, value_delimiter = ',')]
    split: Vec<f64>,
    #[arg(long, default_value_t = 0.999)]
    c_lo: f64,
    #[arg(long, default_value_t = 1.001)]
    c_hi: f64,
    /// Replay a stored certificate instead of building one.
    #[arg(long, conflicts_with = "claim")]
    replay: Option<PathBuf>,
    /// Write the certificate as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ExperimentArgs {
    /// JSON campaign config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    kind: Option<ExperimentKind>,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelTag>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Grid of ratios m/n, comma separated.
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    /// Grid of equation counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Window offsets for window_check, comma separated.
    #[arg(long, value_delimiter = ',')]
    windows: Vec<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "XORSAT_LAB_WORKERS")]
    workers: Option<usize>,
    /// Output stem; writes <out>.csv, <out>.trials.csv and <out>.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PlotArgs {
    /// Campaign CSV to draw.
    #[arg(long, required_unless_present = "hk")]
    input: Option<PathBuf>,
    /// Draw H_k(alpha, zeta; c) against alpha instead.
    #[arg(long)]
    hk: bool,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Values of c for --hk, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.51, 1.0, 1.1])]
    c: Vec<f64>,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the sampled H_k curves as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_model(s: &str) -> std::result::Result<ModelTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Resolved configuration, printed to stderr before any work.
fn announce<T: Serialize>(command: &str, cfg: &T) {
    let text = serde_json::to_string(cfg).unwrap_or_default();
    eprintln!("{command}: {text}");
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn gen(a: &GenArgs) -> Result<ExitCode> {
    let m = match (a.m, a.c) {
        (Some(m), None) => m,
        (None, Some(c)) if c > 0.0 => (c * a.n as f64).round() as usize,
        _ => return Err(Error::InvalidParameter("give exactly one of --m and --c (positive)".into())),
    };
    announce("gen", &json!({"model": a.model, "k": a.k, "n": a.n, "m": m, "seed": a.seed, "out": a.out}));
    let seed = Seed::new(a.seed, 0);
    let inst = match a.model {
        ModelTag::Unconstrained => gen_unconstrained(a.k, m, a.n, seed)?,
        ModelTag::Constrained => gen_constrained(a.k, m, a.n, seed)?,
        ModelTag::RelaxedC => {
            let alloc = gen_c_model(a.k, m, a.n, seed)?;
            let mut rng = Seed::new(a.seed, 1).rng();
            let rhs = (0..m).map(|_| rand::Rng::random::<bool>(&mut rng)).collect();
            alloc.to_instance(rhs)?.with_seed(seed)
        }
    };
    inst.save(&a.out)?;
    print_json(&json!({"path": a.out, "content_hash": inst.content_hash(), "k": inst.k, "n": inst.n, "m": inst.m}))?;
    Ok(ExitCode::SUCCESS)
}

fn solve(a: &SolveArgs) -> Result<ExitCode> {
    announce("solve", a);
    let inst = Instance::load(&a.input)?;
    let (consistent, rank, log2, solution) = if inst.model_tag == ModelTag::RelaxedC {
        let res = gf2::solve(&inst.matrix(), &inst.rhs)?;
        (res.consistent, res.rank, res.consistent.then_some(res.solution_count_log2), res.one_solution)
    } else {
        let trace = peel_trace(&inst, PeelOrder::Fifo)?;
        let core = core_instance(&inst, &trace)?;
        let res = gf2::solve(&core.matrix(), &core.rhs)?;
        let full = match &res.one_solution {
            Some(x) => Some(extend_solution(x, &trace, &inst)?),
            None => None,
        };
        // Peeled equations are independent of the rest and of each other.
        let rank = res.rank + (inst.m - core.m);
        let log2 = res.consistent.then(|| inst.n - rank);
        (res.consistent, rank, log2, full)
    };
    if let Some(x) = &solution {
        if !inst.is_satisfied_by(x)? {
            return Err(Error::Infeasible("extended solution fails verification".into()));
        }
        if let Some(out) = &a.out {
            let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
            std::fs::write(out, bits + "\n")?;
        }
    }
    print_json(&json!({
        "content_hash": inst.content_hash(),
        "k": inst.k, "n": inst.n, "m": inst.m,
        "consistent": consistent,
        "rank": rank,
        "solution_count_log2": log2,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn peel(a: &PeelArgs) -> Result<ExitCode> {
    announce("peel", a);
    let inst = Instance::load(&a.input)?;
    let order = match a.order {
        OrderArg::Fifo => PeelOrder::Fifo,
        OrderArg::Lifo => PeelOrder::Lifo,
    };
    let trace = peel_trace(&inst, order)?;
    let core = core_instance(&inst, &trace)?;
    if let Some(out) = &a.out {
        core.save(out)?;
    }
    let (nv, ne) = (trace.core_vars.len(), trace.core_eqs.len());
    print_json(&json!({
        "content_hash": inst.content_hash(),
        "n": inst.n, "m": inst.m,
        "core_vars": nv, "core_eqs": ne,
        "core_vars_frac": nv as f64 / inst.n as f64,
        "core_eqs_frac": ne as f64 / inst.n as f64,
        "ratio": (nv > 0).then(|| ne as f64 / nv as f64),
        "peel_steps": trace.steps.len(),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn threshold(a: &ThresholdArgs) -> Result<ExitCode> {
    announce("threshold", a);
    print_json(&ThresholdReport::new(a.k, a.c)?)?;
    Ok(ExitCode::SUCCESS)
}

fn default_target(k: usize) -> f64 {
    match k {
        4 => -1e-5,
        5 => -0.005,
        _ => -0.03,
    }
}

fn certify(a: &CertifyArgs) -> Result<ExitCode> {
    announce("certify", a);
    let cert: Certificate = if let Some(path) = &a.replay {
        let stored: Certificate = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        replay(&stored)?
    } else {
        let target = a.target.unwrap_or(default_target(a.k));
        match a.claim {
            None => return Err(Error::InvalidParameter("give --claim or --replay".into())),
            Some(ClaimArg::Amed) => certify_amed(a.k, target)?,
            Some(ClaimArg::SkCells) => {
                if a.split.len() < 2 {
                    return Err(Error::InvalidParameter("--split needs at least two end points".into()));
                }
                let cells: Vec<(f64, f64)> = a.split.windows(2).map(|w| (w[0], w[1])).collect();
                certify_s_k_cells(a.k, &cells, target)?
            }
            Some(ClaimArg::AmedInduction) => certify_amed_induction()?,
            Some(ClaimArg::K3Grid) => certify_k3_grid(Interval::new(a.c_lo, a.c_hi)?)?,
            Some(ClaimArg::Alarge) => certify_alarge_constants()?,
            Some(ClaimArg::Monotonicity) => certify_monotonicity()?,
        }
    };
    if let Some(out) = &a.out {
        std::fs::write(out, serde_json::to_string_pretty(&cert)?)?;
    }
    print_json(&json!({
        "claim_id": cert.claim_id,
        "cells": cert.cells.len(),
        "global_bound": cert.global_bound,
        "worst_margin": cert.worst_margin,
        "verified": cert.verified,
        "failure": cert.failure,
    }))?;
    Ok(if cert.verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn resolve_experiment(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = a.kind {
        cfg.kind = v;
    }
    if let Some(v) = a.model {
        cfg.model = v;
    }
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if !a.c.is_empty() {
        cfg.c_grid = a.c.clone();
        cfg.m_list.clear();
    }
    if !a.m.is_empty() {
        cfg.m_list = a.m.clone();
    }
    if !a.windows.is_empty() {
        cfg.windows = a.windows.clone();
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn experiment(a: &ExperimentArgs) -> Result<ExitCode> {
    let cfg = resolve_experiment(a)?;
    announce("experiment", &cfg);
    let out = run_experiment(&cfg)?;
    let summary = out.summary()?;
    match &cfg.out {
        Some(stem) => {
            let paths = out.write(stem)?;
            eprintln!("wrote {} ({:.1}s)", paths.map(|p| p.display().to_string()).join(", "), out.wall_time);
        }
        None => print!("{}", out.csv()?),
    }
    print_json(&summary)?;
    Ok(if summary.all_gates_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn plot(a: &PlotArgs) -> Result<ExitCode> {
    announce("plot", a);
    if a.hk {
        let chart = h_k_chart(a.k, &a.c, 0.005, 0.995, 198)?;
        if let Some(p) = &a.csv {
            std::fs::write(p, h_k_csv(&h_k_series(a.k, &a.c, 0.005, 0.995, 198)?)?)?;
        }
        std::fs::write(&a.out, chart.to_svg()?)?;
    } else {
        let input = a.input.as_deref().unwrap_or(Path::new(""));
        emit_plot(input, &a.out)?;
    }
    print_json(&json!({"svg": a.out}))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Peel(a) => peel(a),
        Command::Threshold(a) => threshold(a),
        Command::Certify(a) => certify(a),
        Command::Experiment(a) => experiment(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
