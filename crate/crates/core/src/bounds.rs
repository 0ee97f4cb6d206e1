//! Closed-form bounds, expected dimensions, and the exhaustive search for
//! exact singularity thresholds r(m, k).

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagrams::{FerrersDiagram, StaircaseDiagram};
use crate::interp::{self, InterpProblem, RunConfig, Verdict, VerdictKind};
use crate::reduction;
use crate::triangle;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("order k={0} out of range (0..=12)")]
    OrderOutOfRange(u32),
    #[error("k={k} exceeds m={m}")]
    OrderAboveMax { m: u32, k: u32 },
    #[error("search budget exceeded: {0} problems")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Reduction(#[from] reduction::ReductionError),
    #[error(transparent)]
    Interp(#[from] interp::InterpError),
}

/// A space of plane curves: degree and the number of generic singularities
/// of each order (`counts[j]` = singularities of order `j`, i.e. conditions
/// `F_{j+1}`).
#[derive(Debug, Clone)]
pub struct SingularitySpec {
    pub degree: u32,
    pub counts: Vec<u64>,
}

/// The expected dimension `max(0, (d+1)(d+2)/2 - sum p_k (k+1)(k+2)/2)`.
pub fn expected_dimension(spec: &SingularitySpec) -> u64 {
    let d = spec.degree as u64;
    let free = (d + 1) * (d + 2) / 2;
    let used: u64 = spec
        .counts
        .iter()
        .enumerate()
        .map(|(k, &p)| p * ((k as u64 + 1) * (k as u64 + 2) / 2))
        .sum();
    free.saturating_sub(used)
}

/// The closed-form upper bound on r(m, k):
/// `max(6(m+1), 4(m+1)(2m+1)/((k+1)(k+2)))`, rational part rounded up.
pub fn r_bound(m: u32, k: u32) -> Result<u64, BoundsError> {
    if k > 12 {
        return Err(BoundsError::OrderOutOfRange(k));
    }
    if k > m {
        return Err(BoundsError::OrderAboveMax { m, k });
    }
    let m = m as u64;
    let k = k as u64;
    let linear = 6 * (m + 1);
    let num = 4 * (m + 1) * (2 * m + 1);
    let den = (k + 1) * (k + 2);
    let frac = num.div_ceil(den);
    Ok(linear.max(frac))
}

/// The h/q pair from the mixed-conditions theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MixedBound {
    pub d: u32,
    pub max_order: u32,
    pub p: u32,
    /// Least h with `h >= 2D` and `h(h+1) > (p-1) d(d+1)`.
    pub h: u64,
    /// Least q with `q > (h(h-1) + 2D(h-1)) / (d(d+1))`.
    pub q: u64,
}

/// Computes the abundance threshold: when at least `q` conditions of order
/// `d` are present (among conditions of order at most `max_order`), the
/// mixed problem is generically correct.
pub fn mixed_q(d: u32, max_order: u32, p: u32) -> MixedBound {
    let dd = d as u64;
    let cap_d = max_order as u64;
    let mut h = 2 * cap_d;
    while h * (h + 1) <= (p as u64 - 1) * dd * (dd + 1) {
        h += 1;
    }
    // least q strictly above the bound
    let num = h * (h - 1) + 2 * cap_d * (h - 1);
    let den = dd * (dd + 1);
    let q = num / den + 1;
    MixedBound {
        d,
        max_order,
        p,
        h,
        q,
    }
}

/// A mixed interpolation problem given by condition multiplicities:
/// `counts[j]` nodes carrying `F_{j+1}` conditions. The target basis is the
/// 1-step diagram of matching cardinality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedCounts(pub Vec<u64>);

impl MixedCounts {
    pub fn cardinality(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &n)| n * triangle(j as u32 + 1))
            .sum()
    }

    pub fn conditions(&self) -> Vec<FerrersDiagram> {
        let mut out = Vec::new();
        for (j, &n) in self.0.iter().enumerate() {
            let f = FerrersDiagram::full_triangle(j as u32 + 1, 2);
            out.extend(std::iter::repeat(f).take(n as usize));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }
}

/// Applies the trailing-pattern e-reduction to the last `e` levels of an
/// arbitrary staircase diagram: the canonical v-rule without requiring the
/// prefix before those levels to be a full staircase. Used in the regime
/// licensed by the mixed-conditions theorem (at most `max_order` steps and
/// staircase prefix at least `2 * max_order`).
fn general_reduce(cur: &StaircaseDiagram, e: u32) -> Option<StaircaseDiagram> {
    let lv = cur.levels();
    let m = lv.len();
    if m < e as usize {
        return None;
    }
    let w = &lv[m - e as usize..];
    let mut used = vec![false; e as usize + 1];
    let mut v = vec![0u32; e as usize];
    for i in (0..e as usize).rev() {
        let cap = w[i].min(e);
        let mut pick = 0;
        for l in (1..=cap).rev() {
            if !used[l as usize] {
                pick = l;
                break;
            }
        }
        if pick == 0 {
            return None;
        }
        used[pick as usize] = true;
        v[i] = pick;
    }
    let mut levels = lv[..m - e as usize].to_vec();
    levels.extend(w.iter().zip(&v).map(|(&wi, &vi)| wi - vi));
    StaircaseDiagram::from_type(&crate::diagrams::StaircaseType::expanded(levels)).ok()
}

fn full_prefix_len(cur: &StaircaseDiagram) -> u32 {
    let lv = cur.levels();
    let mut full = 0u32;
    while (full as usize) < lv.len() && lv[full as usize] == full + 1 {
        full += 1;
    }
    full
}

/// Greedily consumes conditions by reductions, largest order first.
/// While the diagram has at most `max_order` steps and a staircase prefix
/// of height at least `2 * max_order`, the trailing-pattern reduction is
/// sound for every order; past that regime only the strict proper-diagram
/// reduction is used. Returns the unconsumed conditions and the diagram the
/// chain stopped at; an empty remainder with an empty terminal is a
/// complete proof of correctness.
pub fn chain_consume(counts: &MixedCounts) -> (MixedCounts, StaircaseDiagram) {
    let max_order = counts
        .0
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &n)| n > 0)
        .map(|(j, _)| j as u32 + 1)
        .unwrap_or(0);
    let mut remaining = counts.0.clone();
    let mut cur = StaircaseDiagram::one_step(counts.cardinality());
    'outer: while remaining.iter().any(|&n| n > 0) {
        let roomy = cur.step_count() <= max_order && full_prefix_len(&cur) >= 2 * max_order;
        for j in (0..remaining.len()).rev() {
            if remaining[j] == 0 {
                continue;
            }
            let e = j as u32 + 1;
            if roomy {
                if let Some(next) = general_reduce(&cur, e) {
                    cur = next;
                    remaining[j] -= 1;
                    continue 'outer;
                }
            }
            if !cur.is_proper(e).unwrap_or(false) {
                continue;
            }
            let Ok(v) = reduction::canonical_v(&cur, e) else {
                continue;
            };
            let Ok(step) = reduction::reduce(&cur, e, &v) else {
                continue;
            };
            cur = step.after;
            remaining[j] -= 1;
            continue 'outer;
        }
        break;
    }
    (MixedCounts(remaining), cur)
}

/// Exact fast decisions for small remainders, bypassing sampling:
/// a pure value-conditions problem is always generically correct (distinct
/// monomials are linearly independent functions), and a single-node problem
/// is decided by the hypersurface rank test.
fn quick_subproblem_decision(remaining: &MixedCounts, terminal: &StaircaseDiagram) -> Option<bool> {
    let orders: Vec<(usize, u64)> = remaining
        .0
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(j, &n)| (j, n))
        .collect();
    if orders.is_empty() {
        return Some(terminal.is_empty());
    }
    if orders.len() == 1 {
        let (j, n) = orders[0];
        if j == 0 {
            // Only simple nodes left: always correct.
            return Some(true);
        }
        if n == 1 {
            let d = j as u32 + 1;
            return interp::one_point_correct(&terminal.points(), d, 2).ok();
        }
    }
    None
}

/// Decides generic correctness of the mixed 1-step problem, reduction proof
/// first, direct certification as the fallback and for all negatives.
pub fn decide_mixed(counts: &MixedCounts, config: &RunConfig) -> Result<Verdict, BoundsError> {
    let problem = InterpProblem::new(
        counts.conditions(),
        StaircaseDiagram::one_step(counts.cardinality()).points(),
    )?;
    Ok(interp::is_generically_correct(&problem, config)?)
}

/// Search configuration for [`search_r`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub run: RunConfig,
    /// Per-order ceiling override; by default the mixed-theorem q values.
    pub ceilings: Option<Vec<u64>>,
    /// Hard cap on the number of candidate vectors.
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            run: RunConfig::default(),
            ceilings: None,
            budget: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub m: u32,
    pub k: u32,
    /// Least r such that `p_k > r` forces generic correctness within the
    /// searched region.
    pub r: u64,
    /// Exceptional count vectors, lexicographically sorted.
    pub exceptions: Vec<Vec<u64>>,
}

/// Per-order search ceilings: beyond `q(j+1, m+1, 7)` conditions of order
/// `j`, the mixed theorem certifies correctness, so exceptions cannot hide
/// there.
pub fn default_ceilings(m: u32) -> Vec<u64> {
    (0..=m).map(|j| mixed_q(j + 1, m + 1, 7).q).collect()
}

/// Exhaustively locates every exceptional count vector for orders up to `m`
/// and returns the threshold for order `k`: the largest `p_k` occurring in
/// an exception.
pub fn search_r(m: u32, k: u32, config: &SearchConfig) -> Result<SearchResult, BoundsError> {
    assert!(k <= m);
    let exceptions = exceptional_vectors(m, config)?;
    let r = exceptions.iter().map(|v| v[k as usize]).max().unwrap_or(0);
    Ok(SearchResult {
        m,
        k,
        r,
        exceptions,
    })
}

/// All exceptional count vectors with orders up to `m`, within the
/// mixed-theorem ceilings.
pub fn exceptional_vectors(m: u32, config: &SearchConfig) -> Result<Vec<Vec<u64>>, BoundsError> {
    let ceilings = config
        .ceilings
        .clone()
        .unwrap_or_else(|| default_ceilings(m));
    assert_eq!(ceilings.len(), m as usize + 1);
    let total: u64 = ceilings.iter().product();
    if total > config.budget {
        return Err(BoundsError::BudgetExceeded(total));
    }

    let mut vectors = Vec::with_capacity(total as usize);
    let mut cur = vec![0u64; m as usize + 1];
    loop {
        if !cur.iter().all(|&x| x == 0) {
            vectors.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i > m as usize {
                break;
            }
            cur[i] += 1;
            if cur[i] < ceilings[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i > m as usize {
            break;
        }
    }

    // Stuck subproblems repeat heavily across the region; cache verdicts.
    let cache: Mutex<HashMap<String, VerdictKind>> = Mutex::new(HashMap::new());
    let exceptions: Result<Vec<Option<Vec<u64>>>, BoundsError> = vectors
        .par_iter()
        .map(|v| {
            let counts = MixedCounts(v.clone());
            if decide_mixed_cached(&counts, &config.run, &cache)? {
                Ok(None)
            } else {
                Ok(Some(v.clone()))
            }
        })
        .collect();
    let mut exceptions: Vec<Vec<u64>> = exceptions?.into_iter().flatten().collect();
    exceptions.sort();
    Ok(exceptions)
}

/// Correctness decision with a verdict cache keyed by problem hash.
/// Chain-consumption settles most instances; a stuck chain falls back to a
/// determinant on the remaining subproblem, whose correctness transfers
/// upward. Incorrectness does not transfer, so that case retests the
/// original problem directly.
fn decide_mixed_cached(
    counts: &MixedCounts,
    config: &RunConfig,
    cache: &Mutex<HashMap<String, VerdictKind>>,
) -> Result<bool, BoundsError> {
    let (remaining, terminal) = chain_consume(counts);
    if remaining.is_zero() && terminal.is_empty() {
        return Ok(true);
    }
    match quick_subproblem_decision(&remaining, &terminal) {
        Some(true) => return Ok(true),
        Some(false) => {}
        None => {
            let sub = InterpProblem::new(remaining.conditions(), terminal.points())?;
            if cached_correct(&sub, config, cache)? {
                return Ok(true);
            }
        }
    }
    let original = InterpProblem::new(
        counts.conditions(),
        StaircaseDiagram::one_step(counts.cardinality()).points(),
    )?;
    cached_correct(&original, config, cache)
}

fn cached_correct(
    problem: &InterpProblem,
    config: &RunConfig,
    cache: &Mutex<HashMap<String, VerdictKind>>,
) -> Result<bool, BoundsError> {
    let key = problem.hash();
    if let Some(kind) = cache.lock().unwrap().get(&key) {
        return Ok(*kind == VerdictKind::CertifiedCorrect);
    }
    let verdict = interp::is_generically_correct(problem, config)?;
    cache.lock().unwrap().insert(key, verdict.kind);
    Ok(verdict.kind == VerdictKind::CertifiedCorrect)
}

/// Enumerates the mixed triples `(p_1, p_2, p_3)` with `p_1 <= 9`,
/// `p_2 <= 5`, `p_3 <= 5` whose 1-step problem is not generically correct.
pub fn exceptional_mixed_triples(config: &RunConfig) -> Result<Vec<[u64; 3]>, BoundsError> {
    let cache = Mutex::new(HashMap::new());
    let mut triples: Vec<[u64; 3]> = Vec::new();
    let mut candidates = Vec::new();
    for p1 in 0..=9u64 {
        for p2 in 0..=5u64 {
            for p3 in 0..=5u64 {
                if p1 + p2 + p3 == 0 {
                    continue;
                }
                candidates.push([p1, p2, p3]);
            }
        }
    }
    let results: Result<Vec<Option<[u64; 3]>>, BoundsError> = candidates
        .par_iter()
        .map(|&[p1, p2, p3]| {
            let counts = MixedCounts(vec![p1, p2, p3]);
            if decide_mixed_cached(&counts, config, &cache)? {
                Ok(None)
            } else {
                Ok(Some([p1, p2, p3]))
            }
        })
        .collect();
    triples.extend(results?.into_iter().flatten());
    triples.sort();
    Ok(triples)
}
