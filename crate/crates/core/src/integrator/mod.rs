//! Evaluation of the multiple series through its integral representation
//!
//! ```text
//! L(s; a) = int_{[1, inf)^r} prod_i S_i(t_i) K(t) dt
//! ```
//!
//! truncated to a box [1, T)^r with a certified bound on the remainder.

mod bounds;
mod gauss;
mod rules;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use bounds::{box_tail_bound, tail_bound};
pub use gauss::{gauss_legendre, legendre_values, GaussLegendre};
pub use rules::CellLayout;

use crate::characters::BoundedSequence;
use crate::error::{arg_err, BestEffort, MdlError, Result};
use crate::kernel::{in_domain_d, in_domain_d0, PreparedKernel, SPoint};
use crate::periodic::PeriodicAntiderivatives;
use crate::sum::pairwise_sum;
use rules::{axis_rule, block_count, direct_work, AxisRule};

/// Default ceiling on the work of one evaluation, in cells.
pub const DEFAULT_MAX_CELLS: u64 = 10_000_000;

/// Largest rank handled by the tensor strategy.
pub const MAX_INTEGRAL_RANK: usize = 3;

const MAX_LOG2_CUTOFF: u32 = 52;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationPlan {
    /// Per-axis cutoff T_i; the box is prod [1, T_i).
    pub cutoffs: Vec<u64>,
    /// Gauss nodes per axis per block.
    pub nodes: usize,
    pub layout: CellLayout,
    /// Certified bound on the integral outside the box.
    pub tail_bound: f64,
    /// Estimated quadrature error inside the box.
    pub quadrature_error: f64,
}

impl TruncationPlan {
    pub fn new(cutoffs: Vec<u64>, nodes: usize, layout: CellLayout) -> Self {
        Self {
            cutoffs,
            nodes,
            layout,
            tail_bound: 0.0,
            quadrature_error: 0.0,
        }
    }

    /// Number of integration cells (blocks) in the box.
    pub fn cells(&self) -> f64 {
        self.cutoffs
            .iter()
            .map(|&t| block_count(self.layout, t) as f64)
            .product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Integral,
    Direct,
    IteratedAbel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Integral => "integral",
            Method::Direct => "direct",
            Method::IteratedAbel => "iterated-abel",
        }
    }
}

/// Truncation parameters of whichever method produced a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Plan {
    Truncation(TruncationPlan),
    Horizons { horizons: Vec<u64> },
}

#[derive(Debug, Clone)]
pub struct EvaluationResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: Method,
    pub plan: Plan,
    pub in_d: bool,
    pub in_d0: bool,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct IntegralOptions {
    /// Work ceiling: blocks in the box plus cells summed one by one.
    pub max_cells: u64,
    pub layout: CellLayout,
    /// Gauss nodes for the first of the paired evaluations.
    pub initial_nodes: usize,
    /// Largest node count tried before giving up.
    pub max_nodes: usize,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        Self {
            max_cells: DEFAULT_MAX_CELLS,
            layout: CellLayout::Dyadic,
            initial_nodes: 8,
            max_nodes: 64,
        }
    }
}

fn validate(seqs: &[BoundedSequence], p: &SPoint) -> Result<Vec<f64>> {
    if p.r() > MAX_INTEGRAL_RANK {
        return Err(MdlError::UnsupportedRank(
            p.r(),
            "the integral evaluator handles r <= 3",
        ));
    }
    if seqs.len() != p.r() {
        return arg_err(format!("expected {} sequences, got {}", p.r(), seqs.len()));
    }
    if !in_domain_d(p) {
        return Err(MdlError::Region(
            "s lies outside the proven region D (some suffix sum of Re s is <= 0)".into(),
        ));
    }
    seqs.iter().map(BoundedSequence::partial_sum_bound).collect()
}

fn antiderivative_tables(seqs: &[BoundedSequence], max_nodes: usize) -> Vec<Option<PeriodicAntiderivatives>> {
    seqs.iter()
        .map(|s| {
            s.periodic_table()
                .and_then(|t| PeriodicAntiderivatives::new(t, max_nodes + 1))
        })
        .collect()
}

fn integrate_rules(kernel: &PreparedKernel, rules: &[AxisRule], n0: f64) -> Complex64 {
    fn inner(kernel: &PreparedKernel, rules: &[AxisRule], level: usize, x: &mut [f64; 3], pw: Complex64) -> Complex64 {
        if level == rules.len() {
            return kernel.eval_with_powers(&x[..level], pw);
        }
        let rule = &rules[level];
        let mut acc = Complex64::new(0.0, 0.0);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            x[level] = x[level - 1] + t;
            let next = pw * kernel.power(level, x[level]);
            acc += w * inner(kernel, rules, level + 1, x, next);
        }
        acc
    }
    let outer = &rules[0];
    let partials: Vec<Complex64> = (0..outer.nodes.len())
        .into_par_iter()
        .map(|a| {
            let w = outer.weights[a];
            if w == Complex64::new(0.0, 0.0) {
                return w;
            }
            let mut x = [0.0; 3];
            x[0] = n0 + outer.nodes[a];
            let pw = kernel.power(0, x[0]);
            w * inner(kernel, rules, 1, &mut x, pw)
        })
        .collect();
    pairwise_sum(&partials)
}

fn integrate_with_tables(
    seqs: &[BoundedSequence],
    p: &SPoint,
    cutoffs: &[u64],
    nodes: usize,
    layout: CellLayout,
    tables: &[Option<PeriodicAntiderivatives>],
) -> Result<Complex64> {
    let kernel = PreparedKernel::new(p)?;
    let gl = gauss_legendre(nodes);
    let rules: Vec<AxisRule> = seqs
        .iter()
        .zip(tables)
        .zip(cutoffs)
        .map(|((s, a), &t)| axis_rule(s, a.as_ref(), layout, t, &gl))
        .collect();
    Ok(integrate_rules(&kernel, &rules, p.n0() as f64))
}

/// The integral over the box prod [1, T_i) for a fixed plan.
pub fn integrate_cells(seqs: &[BoundedSequence], p: &SPoint, plan: &TruncationPlan) -> Result<Complex64> {
    validate(seqs, p)?;
    if plan.cutoffs.len() != p.r() {
        return arg_err(format!("expected {} cutoffs, got {}", p.r(), plan.cutoffs.len()));
    }
    if plan.cutoffs.iter().any(|&t| t < 2) {
        return arg_err("cutoffs must be integers >= 2");
    }
    if plan.nodes == 0 {
        return arg_err("at least one quadrature node per block is required");
    }
    let tables = antiderivative_tables(seqs, plan.nodes);
    integrate_with_tables(seqs, p, &plan.cutoffs, plan.nodes, plan.layout, &tables)
}

fn work(
    seqs: &[BoundedSequence],
    tables: &[Option<PeriodicAntiderivatives>],
    layout: CellLayout,
    cutoff: u64,
    nodes: usize,
) -> f64 {
    let cells = (block_count(layout, cutoff) as f64).powi(seqs.len() as i32);
    let direct: f64 = seqs
        .iter()
        .zip(tables)
        .map(|(s, a)| direct_work(s, a.is_some(), layout, cutoff, nodes) as f64)
        .sum();
    cells + direct
}

/// Evaluate with the default options.
pub fn evaluate_integral(seqs: &[BoundedSequence], p: &SPoint, tol: f64) -> Result<EvaluationResult> {
    evaluate_integral_with(seqs, p, tol, &IntegralOptions::default())
}

/// Choose the box from the tail bound (<= tol/2), then double the node count
/// until two successive evaluations differ by <= tol/2.
pub fn evaluate_integral_with(
    seqs: &[BoundedSequence],
    p: &SPoint,
    tol: f64,
    opts: &IntegralOptions,
) -> Result<EvaluationResult> {
    let start = Instant::now();
    if !(tol > 0.0 && tol.is_finite()) {
        return arg_err(format!("tolerance must be positive, got {tol}"));
    }
    if opts.initial_nodes == 0 || opts.max_nodes < 2 * opts.initial_nodes {
        return arg_err("node schedule needs initial_nodes >= 1 and max_nodes >= 2 * initial_nodes");
    }
    let alphas = validate(seqs, p)?;
    let r = p.r();
    let tables = antiderivative_tables(seqs, opts.max_nodes);

    // smallest cutoff meeting the tail budget
    let mut chosen = None;
    let mut best_affordable = None;
    for log2 in 1..=MAX_LOG2_CUTOFF {
        let t = 1u64 << log2;
        if work(seqs, &tables, opts.layout, t, opts.max_nodes) > opts.max_cells as f64 {
            break;
        }
        let tail = box_tail_bound(p, &alphas, &vec![t as f64; r])?;
        best_affordable = Some((t, tail));
        if tail <= tol / 2.0 {
            chosen = Some((t, tail));
            break;
        }
    }
    let budget_error = |t: u64, tail: f64, nodes: usize, msg: String| -> Result<MdlError> {
        let value = integrate_with_tables(seqs, p, &vec![t; r], nodes, opts.layout, &tables)?;
        Ok(MdlError::Budget {
            message: msg,
            best: Some(BestEffort {
                value,
                error_estimate: tail,
            }),
        })
    };
    let (cutoff, tail) = match chosen {
        Some(c) => c,
        None => {
            return Err(match best_affordable {
                Some((t, tail)) => budget_error(
                    t,
                    tail,
                    opts.initial_nodes * 2,
                    format!(
                        "tail bound {tail:.3e} at cutoff {t} exceeds tol/2 = {:.3e} within {} cells",
                        tol / 2.0,
                        opts.max_cells
                    ),
                )?,
                None => MdlError::Budget {
                    message: format!("no truncation box fits within {} cells", opts.max_cells),
                    best: None,
                },
            })
        }
    };
    let cutoffs = vec![cutoff; r];

    let mut nodes = opts.initial_nodes;
    let mut coarse = integrate_with_tables(seqs, p, &cutoffs, nodes, opts.layout, &tables)?;
    loop {
        let fine = integrate_with_tables(seqs, p, &cutoffs, 2 * nodes, opts.layout, &tables)?;
        let quad = (fine - coarse).norm();
        if quad <= tol / 2.0 {
            let mut plan = TruncationPlan::new(cutoffs, 2 * nodes, opts.layout);
            plan.tail_bound = tail;
            plan.quadrature_error = quad;
            return Ok(EvaluationResult {
                value: fine,
                error_estimate: tail + quad,
                method: Method::Integral,
                plan: Plan::Truncation(plan),
                in_d: true,
                in_d0: in_domain_d0(p),
                wall_time: start.elapsed(),
            });
        }
        nodes *= 2;
        if 2 * nodes > opts.max_nodes {
            return Err(MdlError::Budget {
                message: format!(
                    "quadrature estimate {quad:.3e} exceeds tol/2 = {:.3e} at {nodes} nodes per block",
                    tol / 2.0
                ),
                best: Some(BestEffort {
                    value: fine,
                    error_estimate: tail + quad,
                }),
            });
        }
        coarse = fine;
    }
}
