//! 2-core peeling with a replayable trace.
//!
//! A variable occurring in at most one live equation can always be satisfied
//! afterwards, so it is removed together with that equation. What survives is
//! the 2-core: every remaining variable sits in at least two remaining
//! equations. The trace records each removal so that a core solution can be
//! lifted back to the full system by back substitution.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::instance::{Instance, ModelTag};

/// Order in which pending low-degree variables are processed. The resulting
/// core does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeelOrder {
    #[default]
    Fifo,
    Lifo,
}

/// Removal of one variable, with the equation it took along (if any) and the
/// other live variables of that equation at that moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelStep {
    pub var: usize,
    pub eq: Option<usize>,
    pub others: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PeelTrace {
    pub steps: Vec<PeelStep>,
    /// Original index of each core variable, increasing.
    pub core_vars: Vec<usize>,
    /// Original index of each core equation, increasing.
    pub core_eqs: Vec<usize>,
}

/// Order `N` and size `M` of the 2-core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreStats {
    pub core_vars: usize,
    pub core_eqs: usize,
    /// `M / N`, absent when the core is empty.
    pub ratio: Option<f64>,
}

impl CoreStats {
    fn new(core_vars: usize, core_eqs: usize) -> Self {
        let ratio = (core_vars > 0).then(|| core_eqs as f64 / core_vars as f64);
        Self {
            core_vars,
            core_eqs,
            ratio,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.core_vars == 0
    }
}

fn check_simple(inst: &Instance) -> Result<()> {
    if inst.model_tag == ModelTag::RelaxedC {
        return Err(invalid("peeling needs distinct variables per row; got a relaxed chip-model instance"));
    }
    inst.validate()
}

/// Peels without building the core instance.
pub fn peel_trace(inst: &Instance, order: PeelOrder) -> Result<PeelTrace> {
    check_simple(inst)?;
    let (n, m) = (inst.n, inst.m);
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, row) in inst.rows.iter().enumerate() {
        for &v in row {
            incidence[v].push(e);
        }
    }
    let mut degree: Vec<usize> = incidence.iter().map(Vec::len).collect();
    let mut var_alive = vec![true; n];
    let mut eq_alive = vec![true; m];
    let mut queued = vec![false; n];
    let mut pending: VecDeque<usize> = VecDeque::new();
    for v in 0..n {
        if degree[v] <= 1 {
            queued[v] = true;
            pending.push_back(v);
        }
    }
    let mut steps = Vec::new();
    loop {
        let next = match order {
            PeelOrder::Fifo => pending.pop_front(),
            PeelOrder::Lifo => pending.pop_back(),
        };
        let Some(v) = next else { break };
        queued[v] = false;
        if !var_alive[v] || degree[v] > 1 {
            continue;
        }
        var_alive[v] = false;
        let eq = incidence[v].iter().copied().find(|&e| eq_alive[e]);
        let mut others = Vec::new();
        if let Some(e) = eq {
            eq_alive[e] = false;
            for &u in &inst.rows[e] {
                if u == v {
                    continue;
                }
                others.push(u);
                degree[u] -= 1;
                if degree[u] <= 1 && var_alive[u] && !queued[u] {
                    queued[u] = true;
                    pending.push_back(u);
                }
            }
        }
        degree[v] = 0;
        steps.push(PeelStep { var: v, eq, others });
    }
    Ok(PeelTrace {
        steps,
        core_vars: (0..n).filter(|&v| var_alive[v]).collect(),
        core_eqs: (0..m).filter(|&e| eq_alive[e]).collect(),
    })
}

/// The core system named by a trace, with variables renumbered in order.
pub fn core_instance(inst: &Instance, trace: &PeelTrace) -> Result<Instance> {
    let mut relabel = vec![usize::MAX; inst.n];
    for (i, &v) in trace.core_vars.iter().enumerate() {
        relabel[v] = i;
    }
    let mut rows = Vec::with_capacity(trace.core_eqs.len());
    let mut rhs = Vec::with_capacity(trace.core_eqs.len());
    for &e in &trace.core_eqs {
        let row: Option<Vec<usize>> = inst.rows[e]
            .iter()
            .map(|&v| (relabel[v] != usize::MAX).then_some(relabel[v]))
            .collect();
        let row = row.ok_or_else(|| Error::Malformed(format!("core equation {e} uses a peeled variable")))?;
        rows.push(row);
        rhs.push(inst.rhs[e]);
    }
    Ok(Instance {
        k: inst.k,
        n: trace.core_vars.len(),
        m: rows.len(),
        rows,
        rhs,
        model_tag: inst.model_tag,
        seed: inst.seed,
    })
}

/// The 2-core, the removal trace, and the core's size.
pub fn two_core(inst: &Instance) -> Result<(Instance, PeelTrace, CoreStats)> {
    two_core_with_order(inst, PeelOrder::Fifo)
}

pub fn two_core_with_order(inst: &Instance, order: PeelOrder) -> Result<(Instance, PeelTrace, CoreStats)> {
    let trace = peel_trace(inst, order)?;
    let core = core_instance(inst, &trace)?;
    let stats = CoreStats::new(core.n, core.m);
    debug_assert!(core.degrees().iter().all(|&d| d >= 2));
    Ok((core, trace, stats))
}

/// Core statistics only.
pub fn core_density(inst: &Instance) -> Result<CoreStats> {
    let trace = peel_trace(inst, PeelOrder::Fifo)?;
    Ok(CoreStats::new(trace.core_vars.len(), trace.core_eqs.len()))
}

/// Lifts a solution of the core to a solution of the whole system. Variables
/// peeled without an equation are set to 0.
pub fn extend_solution(core_solution: &[bool], trace: &PeelTrace, inst: &Instance) -> Result<Vec<bool>> {
    if core_solution.len() != trace.core_vars.len() {
        return Err(Error::DimensionMismatch {
            expected: trace.core_vars.len(),
            actual: core_solution.len(),
        });
    }
    let core = core_instance(inst, trace)?;
    if !core.is_satisfied_by(core_solution)? {
        return Err(Error::Infeasible("core solution does not satisfy the core system".into()));
    }
    let mut x = vec![false; inst.n];
    for (&v, &b) in trace.core_vars.iter().zip(core_solution) {
        x[v] = b;
    }
    for step in trace.steps.iter().rev() {
        x[step.var] = match step.eq {
            None => false,
            Some(e) => step.others.iter().fold(inst.rhs[e], |acc, &u| acc ^ x[u]),
        };
    }
    Ok(x)
}
