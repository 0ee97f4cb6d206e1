//! The d-reduction calculus: canonical and custom v-sequences, reduction
//! steps and chains, degred, and brute-force verification of exceptional
//! sets.

use std::fmt;

use thiserror::Error;

use crate::diagrams::{DiagramError, MultiIndex, StaircaseDiagram, StaircaseType};
use crate::interp;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("not {d}-reducible: stuck at {diagram}")]
    NotReducible { d: u32, diagram: StaircaseDiagram },
    #[error("not a reduction: {0}")]
    NotAReduction(String),
    #[error("invalid v-sequence: {0}")]
    InvalidV(String),
    #[error("stop cardinality {stop} is not reachable from {card} in steps of {step}")]
    BadStop { stop: u64, card: u64, step: u64 },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("instance too large: {0} candidate subsets exceed budget {1}")]
    BudgetExceeded(u64, u64),
    #[error(transparent)]
    Interp(#[from] interp::InterpError),
}

/// A selection `(v_1, ..., v_d)` of pairwise distinct values from
/// `{1, ..., d}`, prescribing how many points to remove from each trailing
/// level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VSequence(pub Vec<u32>);

impl VSequence {
    /// Validates against a diagram: entries distinct, in `{1, ..., d}` and
    /// bounded by the trailing level widths.
    pub fn validate(&self, diagram: &StaircaseDiagram, d: u32) -> Result<(), ReductionError> {
        let v = &self.0;
        if v.len() != d as usize {
            return Err(ReductionError::InvalidV(format!(
                "expected {d} entries, got {}",
                v.len()
            )));
        }
        let mut seen = vec![false; d as usize + 1];
        for &x in v {
            if x == 0 || x > d {
                return Err(ReductionError::InvalidV(format!(
                    "entry {x} outside 1..={d}"
                )));
            }
            if seen[x as usize] {
                return Err(ReductionError::InvalidV(format!("entry {x} repeated")));
            }
            seen[x as usize] = true;
        }
        let split = diagram.normalize_for_d(d)?;
        for (i, (&vi, &wi)) in v.iter().zip(&split.trailing).enumerate() {
            if vi > wi {
                return Err(ReductionError::InvalidV(format!(
                    "v_{} = {} exceeds level width {}",
                    i + 1,
                    vi,
                    wi
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for VSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, ")")
    }
}

/// One application of a d-reduction.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub before: StaircaseDiagram,
    pub v: VSequence,
    pub after: StaircaseDiagram,
    /// The removed points: on trailing level `i`, the `v_i` points with the
    /// largest second coordinate.
    pub removed: Vec<MultiIndex>,
    /// Whether `v` is the canonical choice for `before`.
    pub canonical: bool,
}

/// A sequence of composable reduction steps.
#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub d: u32,
    pub steps: Vec<ReductionStep>,
    pub terminal: StaircaseDiagram,
}

impl ReductionChain {
    /// Arrow-notation rendering, one line for the whole chain. Custom steps
    /// carry their v-sequence on the arrow.
    pub fn arrow_line(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.steps.first() {
            out.push_str(&first.before.to_string());
        } else {
            out.push_str(&self.terminal.to_string());
        }
        for s in &self.steps {
            if s.canonical {
                out.push_str(" -> ");
            } else {
                out.push_str(&format!(" -{}-> ", s.v));
            }
            out.push_str(&s.after.to_string());
        }
        out
    }
}

impl fmt::Display for ReductionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.arrow_line())
    }
}

/// The canonical v-sequence: starting from `v_d` and going down, `v_i` is
/// the largest unused value in `{1, ..., d}` not exceeding the i-th trailing
/// entry. Fails when some index admits no value.
pub fn canonical_v(diagram: &StaircaseDiagram, d: u32) -> Result<VSequence, ReductionError> {
    let split = diagram.normalize_for_d(d)?;
    let mut used = vec![false; d as usize + 1];
    let mut v = vec![0u32; d as usize];
    for i in (0..d as usize).rev() {
        let cap = split.trailing[i].min(d);
        let mut pick = 0;
        for l in (1..=cap).rev() {
            if !used[l as usize] {
                pick = l;
                break;
            }
        }
        if pick == 0 {
            return Err(ReductionError::NotReducible {
                d,
                diagram: diagram.clone(),
            });
        }
        used[pick as usize] = true;
        v[i] = pick;
    }
    Ok(VSequence(v))
}

/// Applies the reduction prescribed by `v`: the resulting type is
/// `(~a, w_1 - v_1, ..., w_d - v_d)`, and the removed points are the `v_i`
/// highest points of each trailing level.
pub fn reduce(
    diagram: &StaircaseDiagram,
    d: u32,
    v: &VSequence,
) -> Result<ReductionStep, ReductionError> {
    v.validate(diagram, d)?;
    let split = diagram.normalize_for_d(d)?;
    let mut levels: Vec<u32> = (1..=split.prefix).collect();
    levels.extend(split.trailing.iter().zip(&v.0).map(|(&w, &vi)| w - vi));
    let after = StaircaseDiagram::from_type(&StaircaseType::expanded(levels))
        .map_err(|e| ReductionError::NotAReduction(e.to_string()))?;

    let mut removed = Vec::new();
    for (i, (&w, &vi)) in split.trailing.iter().zip(&v.0).enumerate() {
        let deg = split.prefix + i as u32;
        for y in (w - vi)..w {
            removed.push(MultiIndex(vec![deg - y, y]));
        }
    }

    let canonical = canonical_v(diagram, d).map(|c| c == *v).unwrap_or(false);
    Ok(ReductionStep {
        before: diagram.clone(),
        v: v.clone(),
        after,
        removed,
        canonical,
    })
}

/// Repeatedly applies the canonical reduction until the cardinality reaches
/// `stop`. Surfaces the stuck diagram when a step fails.
pub fn chain(
    diagram: &StaircaseDiagram,
    d: u32,
    stop: u64,
) -> Result<ReductionChain, ReductionError> {
    let t = crate::triangle(d);
    let card = diagram.cardinality();
    if stop > card || (card - stop) % t != 0 {
        return Err(ReductionError::BadStop {
            stop,
            card,
            step: t,
        });
    }
    let mut steps = Vec::new();
    let mut cur = diagram.clone();
    while cur.cardinality() > stop {
        let v = canonical_v(&cur, d)?;
        let step = reduce(&cur, d, &v)?;
        cur = step.after.clone();
        steps.push(step);
    }
    Ok(ReductionChain {
        d,
        steps,
        terminal: cur,
    })
}

/// Total degree of the product of the monomials in `E`.
pub fn degred(points: &[MultiIndex]) -> u64 {
    points.iter().map(|p| p.total()).sum()
}

/// Brute-force check that `E` is exceptional in `B` with respect to `F_d`:
/// the one-node problem on `E` is generically correct, and every other
/// subset of `B` of the same size and the same exponent-vector sum fails the
/// one-node test. Enumeration refuses above `budget` candidate subsets.
pub fn verify_exceptional(
    e: &[MultiIndex],
    b: &[MultiIndex],
    d: u32,
    budget: u64,
) -> Result<bool, ReductionError> {
    assert!(!e.is_empty());
    let n = e[0].dim();
    let size = e.len();
    assert_eq!(
        size as u64,
        crate::triangle(d),
        "exceptional candidate has wrong size"
    );
    for p in e {
        assert!(b.contains(p), "E must be a subset of B");
    }

    if !interp::one_point_correct(e, d, n)? {
        return Ok(false);
    }

    let target: Vec<u64> = (0..n)
        .map(|c| e.iter().map(|p| p.0[c] as u64).sum())
        .collect();

    // Enumerate subsets of b with the target exponent-vector sum.
    let bound: u64 = {
        let mut acc: u64 = 1;
        for i in 0..size {
            acc = acc.saturating_mul((b.len() - i) as u64) / (i as u64 + 1);
        }
        acc
    };
    if bound > budget {
        return Err(ReductionError::BudgetExceeded(bound, budget));
    }

    let e_sorted: Vec<&MultiIndex> = {
        let mut v: Vec<&MultiIndex> = e.iter().collect();
        v.sort();
        v
    };

    let mut stack: Vec<usize> = Vec::with_capacity(size);
    let mut sums = vec![0u64; n];
    let mut ok = true;

    // Depth-first over index combinations, pruning on the running sum.
    fn rec(
        b: &[MultiIndex],
        start: usize,
        need: usize,
        sums: &mut Vec<u64>,
        target: &[u64],
        stack: &mut Vec<usize>,
        e_sorted: &[&MultiIndex],
        d: u32,
        n: usize,
        ok: &mut bool,
    ) -> Result<(), ReductionError> {
        if !*ok {
            return Ok(());
        }
        if need == 0 {
            if sums == target {
                let subset: Vec<MultiIndex> = stack.iter().map(|&i| b[i].clone()).collect();
                let mut sorted: Vec<&MultiIndex> = subset.iter().collect();
                sorted.sort();
                if sorted != e_sorted && interp::one_point_correct(&subset, d, n)? {
                    *ok = false;
                }
            }
            return Ok(());
        }
        if b.len() - start < need {
            return Ok(());
        }
        for i in start..b.len() {
            let mut feasible = true;
            for c in 0..n {
                let s = sums[c] + b[i].0[c] as u64;
                if s > target[c] {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                for c in 0..n {
                    sums[c] += b[i].0[c] as u64;
                }
                stack.push(i);
                rec(b, i + 1, need - 1, sums, target, stack, e_sorted, d, n, ok)?;
                stack.pop();
                for c in 0..n {
                    sums[c] -= b[i].0[c] as u64;
                }
            }
        }
        Ok(())
    }

    rec(
        b, 0, size, &mut sums, &target, &mut stack, &e_sorted, d, n, &mut ok,
    )?;
    Ok(ok)
}
