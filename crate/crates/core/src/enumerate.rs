//! Exhaustive generation of d-diagrams, reduction to base cases, and the
//! base-case verification pipeline.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagrams::StaircaseDiagram;
use crate::interp::{self, InterpProblem, RunConfig, Verdict, VerdictKind};
use crate::reduction::{self, ReductionError};
use crate::triangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFilter {
    All,
    Proper,
    SafelyProper,
}

/// Streams every diagram of the given cardinality with at most `max_steps`
/// steps into `sink`. Diagrams are visited once each, keyed by their
/// monotone representation (prefix height, non-increasing trailing).
fn generate(cardinality: u64, max_steps: u32, sink: &mut impl FnMut(StaircaseDiagram)) {
    fn parts_rec(
        rem: u64,
        slots: u32,
        maxpart: u32,
        acc: &mut Vec<u32>,
        prefix: u32,
        sink: &mut impl FnMut(StaircaseDiagram),
    ) {
        if rem == 0 {
            let mut levels: Vec<u32> = (1..=prefix).collect();
            levels.extend(acc.iter().copied());
            let t = crate::diagrams::StaircaseType::expanded(levels);
            sink(StaircaseDiagram::from_type(&t).expect("generated type is valid"));
            return;
        }
        if slots == 0 {
            return;
        }
        let cap = maxpart.min(rem.min(u32::MAX as u64) as u32);
        for part in (1..=cap).rev() {
            if (part as u64) * (slots as u64) < rem {
                break;
            }
            acc.push(part);
            parts_rec(rem - part as u64, slots - 1, part, acc, prefix, sink);
            acc.pop();
        }
    }

    let mut a = 0u32;
    while triangle(a) <= cardinality {
        let rem = cardinality - triangle(a);
        if rem <= (max_steps as u64) * (a as u64) {
            let mut acc = Vec::new();
            parts_rec(rem, max_steps, a, &mut acc, a, sink);
        }
        a += 1;
    }
}

fn passes(diagram: &StaircaseDiagram, d: u32, filter: DiagramFilter) -> bool {
    match filter {
        DiagramFilter::All => true,
        DiagramFilter::Proper => diagram.is_proper(d).unwrap_or(false),
        DiagramFilter::SafelyProper => diagram.is_safely_proper(d).unwrap_or(false),
    }
}

/// All d-diagrams for `nodes` nodes satisfying the filter, in lexicographic
/// order of their expanded types.
pub fn enumerate_d_diagrams(d: u32, nodes: u32, filter: DiagramFilter) -> Vec<StaircaseDiagram> {
    let mut out = Vec::new();
    generate(nodes as u64 * triangle(d), d, &mut |f| {
        if passes(&f, d, filter) {
            out.push(f);
        }
    });
    out.sort_by(|x, y| x.levels().cmp(y.levels()));
    out
}

/// Every staircase diagram of the given cardinality, regardless of step
/// count, in lexicographic type order.
pub fn all_diagrams_of_cardinality(cardinality: u64) -> Vec<StaircaseDiagram> {
    let mut out = Vec::new();
    let steps = cardinality.min(u32::MAX as u64) as u32;
    generate(cardinality, steps, &mut |f| out.push(f));
    out.sort_by(|x, y| x.levels().cmp(y.levels()));
    out
}

/// Count without materializing.
pub fn count_d_diagrams(d: u32, nodes: u32, filter: DiagramFilter) -> u64 {
    let mut n = 0u64;
    generate(nodes as u64 * triangle(d), d, &mut |f| {
        if passes(&f, d, filter) {
            n += 1;
        }
    });
    n
}

/// Diagrams of cardinality `nodes * T(d)` with at most `step_bound` steps;
/// the filter predicates are evaluated with respect to `step_bound`.
pub fn enumerate_with_step_bound(
    d: u32,
    step_bound: u32,
    nodes: u32,
    filter: DiagramFilter,
) -> Vec<StaircaseDiagram> {
    let mut out = Vec::new();
    generate(nodes as u64 * triangle(d), step_bound, &mut |f| {
        if passes(&f, step_bound, filter) {
            out.push(f);
        }
    });
    out.sort_by(|x, y| x.levels().cmp(y.levels()));
    out
}

/// Canonically reduces every safely proper d-diagram at `from_nodes` nodes
/// down to `to_nodes` nodes and returns the deduplicated terminal set.
pub fn reduce_to_basecases(
    d: u32,
    from_nodes: u32,
    to_nodes: u32,
) -> Result<BTreeSet<StaircaseDiagram>, ReductionError> {
    assert!(to_nodes < from_nodes);
    let stop = to_nodes as u64 * triangle(d);
    let mut terminals = BTreeSet::new();
    for f in enumerate_d_diagrams(d, from_nodes, DiagramFilter::SafelyProper) {
        let chain = reduction::chain(&f, d, stop)?;
        terminals.insert(chain.terminal);
    }
    Ok(terminals)
}

#[derive(Debug, Clone, Serialize)]
pub enum FailureReason {
    NotSafelyProper,
    NotCorrect(VerdictKind),
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseCaseFailure {
    pub diagram: String,
    pub reason: FailureReason,
}

/// Result of a base-case verification sweep.
#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub d: u32,
    pub step_bound: u32,
    pub nodes: u32,
    /// Size of the enumerated family.
    pub total: u64,
    /// How many diagrams were actually checked (differs from `total` only
    /// when stopping early).
    pub checked: u64,
    pub failures: Vec<BaseCaseFailure>,
    pub early_stopped: bool,
}

impl EnumerationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.d,
            self.nodes,
            self.total,
            "",
            self.failures.len()
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub run: RunConfig,
    /// When set, condition (1) requires safely-properness; otherwise the
    /// family membership (properness) is all that is demanded.
    pub require_safely_proper: bool,
    /// Stop at the first failure instead of sweeping the whole family.
    pub early_stop: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            run: RunConfig::default(),
            require_safely_proper: false,
            early_stop: false,
        }
    }
}

/// Verifies the base cases behind the induction: enumerates every proper
/// diagram of cardinality `nodes * T(d)` with at most `step_bound` steps and
/// checks the required conditions. The 1-step target diagram is checked
/// first. A probably-incorrect verdict counts as a failure.
pub fn verify_basecases(
    d: u32,
    step_bound: u32,
    nodes: u32,
    config: &VerifyConfig,
) -> Result<EnumerationReport, ReductionError> {
    assert!(step_bound >= d);
    let mut family = enumerate_with_step_bound(d, step_bound, nodes, DiagramFilter::Proper);
    let total = family.len() as u64;
    // The theorem's target diagram goes first.
    let one_step = StaircaseDiagram::one_step(nodes as u64 * triangle(d));
    if let Some(pos) = family.iter().position(|f| *f == one_step) {
        family.swap(0, pos);
    }

    let check = |f: &StaircaseDiagram| -> Result<Option<BaseCaseFailure>, ReductionError> {
        if config.require_safely_proper && !f.is_safely_proper(step_bound)? {
            return Ok(Some(BaseCaseFailure {
                diagram: f.to_string(),
                reason: FailureReason::NotSafelyProper,
            }));
        }
        let verdict = check_nodes_problem(d, nodes, f, &config.run)?;
        if verdict.kind != VerdictKind::CertifiedCorrect {
            return Ok(Some(BaseCaseFailure {
                diagram: f.to_string(),
                reason: FailureReason::NotCorrect(verdict.kind),
            }));
        }
        Ok(None)
    };

    if config.early_stop {
        let mut failures = Vec::new();
        let mut checked = 0u64;
        for f in &family {
            checked += 1;
            if let Some(fail) = check(f)? {
                failures.push(fail);
                return Ok(EnumerationReport {
                    d,
                    step_bound,
                    nodes,
                    total,
                    checked,
                    failures,
                    early_stopped: true,
                });
            }
        }
        Ok(EnumerationReport {
            d,
            step_bound,
            nodes,
            total,
            checked,
            failures: Vec::new(),
            early_stopped: false,
        })
    } else {
        let results: Result<Vec<Option<BaseCaseFailure>>, ReductionError> =
            family.par_iter().map(check).collect();
        let mut failures: Vec<BaseCaseFailure> = results?.into_iter().flatten().collect();
        failures.sort_by(|a, b| a.diagram.cmp(&b.diagram));
        Ok(EnumerationReport {
            d,
            step_bound,
            nodes,
            total,
            checked: total,
            failures,
            early_stopped: false,
        })
    }
}

/// Builds and decides the problem `({F_d}_nodes, F)`.
pub fn check_nodes_problem(
    d: u32,
    nodes: u32,
    basis: &StaircaseDiagram,
    config: &RunConfig,
) -> Result<Verdict, ReductionError> {
    let fd = crate::diagrams::FerrersDiagram::full_triangle(d, 2);
    let conditions = vec![fd; nodes as usize];
    let problem = InterpProblem::new(conditions, basis.points())?;
    Ok(interp::is_generically_correct(&problem, config)?)
}

/// Attempts the reduction-based correctness proof for the 1-step problem:
/// canonically reduce while every chain element is proper, down to a single
/// node, then decide the terminal exactly. Returns `Some(())` when the chain
/// proves correctness, `None` when it is inconclusive.
pub fn one_step_chain_proof(d: u32, nodes: u32) -> Option<()> {
    let mut cur = StaircaseDiagram::one_step(nodes as u64 * triangle(d));
    while cur.cardinality() > triangle(d) {
        if !cur.is_proper(d).unwrap_or(false) {
            return None;
        }
        let v = reduction::canonical_v(&cur, d).ok()?;
        cur = reduction::reduce(&cur, d, &v).ok()?.after;
    }
    if interp::one_point_correct(&cur.points(), d, 2).ok()? {
        Some(())
    } else {
        None
    }
}

/// Decides whether the unique 1-step diagram is good for interpolating in
/// `nodes` nodes of type `F_d`: reduction-based proof first, direct
/// determinant certification always confirming the returned verdict.
pub fn decide_one_step(d: u32, nodes: u32, config: &RunConfig) -> Result<Verdict, ReductionError> {
    let basis = StaircaseDiagram::one_step(nodes as u64 * triangle(d));
    let chain_proof = one_step_chain_proof(d, nodes);
    let verdict = check_nodes_problem(d, nodes, &basis, config)?;
    if chain_proof.is_some() {
        debug_assert_eq!(verdict.kind, VerdictKind::CertifiedCorrect);
    }
    Ok(verdict)
}
