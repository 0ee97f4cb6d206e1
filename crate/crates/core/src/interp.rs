//! Derivative evaluation, interpolation matrices, and generic-correctness
//! verdicts.
//!
//! The verdict protocol: the interpolation determinant has integer
//! coefficients once node coordinates are integers, so a single nonzero
//! evaluation modulo a prime certifies that the determinant is a nonzero
//! polynomial. Zero evaluations are only evidence of incorrectness; small
//! instances fall through to an exact symbolic determinant, larger ones
//! return a probabilistic verdict with a Schwartz-Zippel error bound.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagrams::{FerrersDiagram, MultiIndex};
use crate::exact;
use crate::modp::{self, RankTracker};

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("problem is not square: {conditions} conditions vs {basis} basis monomials")]
    NotSquare { conditions: usize, basis: usize },
    #[error("prime {prime} too small: must exceed degree bound {bound}")]
    PrimeTooSmall { prime: u64, bound: u64 },
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("expected {expected} exponents, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("mixed field elements")]
    MixedField,
    #[error("failed to find a witness for a nonzero determinant")]
    WitnessSearchFailed,
}

/// Field element for the public matrix API: an exact rational or a residue
/// modulo a 64-bit prime.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldElement {
    Rational(BigRational),
    Mod { value: u64, prime: u64 },
}

impl FieldElement {
    pub fn from_int(n: i64) -> Self {
        FieldElement::Rational(BigRational::from(BigInt::from(n)))
    }

    pub fn modular(value: u64, prime: u64) -> Self {
        FieldElement::Mod {
            value: value % prime,
            prime,
        }
    }

    fn mul(&self, other: &FieldElement) -> Result<FieldElement, InterpError> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => {
                Ok(FieldElement::Rational(a * b))
            }
            (
                FieldElement::Mod { value: a, prime: p },
                FieldElement::Mod { value: b, prime: q },
            ) if p == q => Ok(FieldElement::Mod {
                value: modp::mulmod(*a, *b, *p),
                prime: *p,
            }),
            _ => Err(InterpError::MixedField),
        }
    }

    fn pow(&self, e: u32) -> FieldElement {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.pow(e as i32)),
            FieldElement::Mod { value, prime } => FieldElement::Mod {
                value: modp::powmod(*value, e as u64, *prime),
                prime: *prime,
            },
        }
    }

    fn from_u64_like(&self, n: u64) -> FieldElement {
        match self {
            FieldElement::Rational(_) => FieldElement::Rational(BigRational::from(BigInt::from(n))),
            FieldElement::Mod { prime, .. } => FieldElement::modular(n, *prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(a) => a.is_zero(),
            FieldElement::Mod { value, .. } => *value == 0,
        }
    }
}

/// Graded comparison: by total degree, ties by the reversed exponent vector,
/// so that for n=2 monomials of equal degree sort by ascending second
/// coordinate.
pub fn graded_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    a.total().cmp(&b.total()).then_with(|| {
        let ra = a.0.iter().rev();
        let rb = b.0.iter().rev();
        ra.cmp(rb)
    })
}

/// The first `count` monomials of `K[x_1..x_n]` in graded order.
pub fn monomials_graded(n: usize, count: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(count);
    let mut deg = 0u32;
    while out.len() < count {
        let mut level = compositions(deg, n);
        level.sort_by(graded_cmp);
        for m in level {
            if out.len() == count {
                break;
            }
            out.push(m);
        }
        deg += 1;
    }
    out
}

fn compositions(total: u32, n: usize) -> Vec<MultiIndex> {
    fn rec(total: u32, n: usize, acc: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            let mut v = acc.clone();
            v.push(total);
            out.push(MultiIndex(v));
            return;
        }
        for first in 0..=total {
            acc.push(first);
            rec(total - first, n - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, n, &mut Vec::new(), &mut out);
    out
}

/// A square Hermite interpolation problem: a sequence of condition diagrams
/// and a candidate monomial basis of matching total cardinality.
#[derive(Debug, Clone)]
pub struct InterpProblem {
    conditions: Vec<FerrersDiagram>,
    basis: Vec<MultiIndex>,
    dim: usize,
}

impl InterpProblem {
    pub fn new(
        conditions: Vec<FerrersDiagram>,
        basis: Vec<MultiIndex>,
    ) -> Result<Self, InterpError> {
        let c: usize = conditions.iter().map(|f| f.cardinality()).sum();
        if c != basis.len() {
            return Err(InterpError::NotSquare {
                conditions: c,
                basis: basis.len(),
            });
        }
        let dim = conditions
            .first()
            .map(|f| f.dim())
            .or_else(|| basis.first().map(|m| m.dim()))
            .unwrap_or(2);
        if conditions.iter().any(|f| f.dim() != dim) || basis.iter().any(|m| m.dim() != dim) {
            return Err(InterpError::DimensionMismatch);
        }
        let mut basis = basis;
        basis.sort_by(graded_cmp);
        Ok(InterpProblem {
            conditions,
            basis,
            dim,
        })
    }

    pub fn conditions(&self) -> &[FerrersDiagram] {
        &self.conditions
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn node_count(&self) -> usize {
        self.conditions.len()
    }

    /// Degree bound of the interpolation determinant in the node
    /// coordinates: the total degree of the basis product.
    pub fn degree_bound(&self) -> u64 {
        self.basis.iter().map(|m| m.total()).sum()
    }

    /// Row order: conditions grouped by diagram, each diagram's derivative
    /// orders in graded order.
    fn rows(&self) -> Vec<(usize, MultiIndex)> {
        let mut rows = Vec::with_capacity(self.size());
        for (i, f) in self.conditions.iter().enumerate() {
            let mut betas: Vec<MultiIndex> = f.points().to_vec();
            betas.sort_by(graded_cmp);
            rows.extend(betas.into_iter().map(|b| (i, b)));
        }
        rows
    }

    /// Stable content hash of the problem, for the verdict cache.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("dim={};", self.dim));
        for f in &self.conditions {
            h.update("F[");
            for p in f.points() {
                h.update(format!("{p};"));
            }
            h.update("]");
        }
        h.update("B[");
        for m in &self.basis {
            h.update(format!("{m};"));
        }
        h.update("]");
        let out = h.finalize();
        out.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

/// The derivative-evaluation entry: the partial derivative of `x^alpha` of
/// order `beta`, evaluated at `point`.
pub fn phi(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    point: &[FieldElement],
) -> Result<FieldElement, InterpError> {
    if alpha.dim() != beta.dim() || alpha.dim() != point.len() {
        return Err(InterpError::DimensionMismatch);
    }
    let Some(proto) = point.first() else {
        return Err(InterpError::DimensionMismatch);
    };
    if !beta.leq(alpha) {
        let zero = proto.from_u64_like(0);
        return Ok(zero);
    }
    let mut acc = proto.from_u64_like(1);
    for i in 0..alpha.dim() {
        let (a, b) = (alpha.0[i], beta.0[i]);
        // Falling factorial a(a-1)...(a-b+1), computed in the field.
        for k in 0..b {
            acc = acc.mul(&proto.from_u64_like((a - k) as u64))?;
        }
        acc = acc.mul(&point[i].pow(a - b))?;
    }
    Ok(acc)
}

/// Interpolation matrix for the problem at the given nodes (one node per
/// condition diagram). Row k is the condition `(p, beta)_k`, column l the
/// basis monomial `x^{alpha_l}`.
pub fn build_matrix(
    problem: &InterpProblem,
    points: &[Vec<FieldElement>],
) -> Result<Vec<Vec<FieldElement>>, InterpError> {
    if points.len() != problem.node_count() {
        return Err(InterpError::DimensionMismatch);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(InterpError::DimensionMismatch);
            }
        }
    }
    let rows = problem.rows();
    let mut m = Vec::with_capacity(rows.len());
    for (node, beta) in &rows {
        let mut row = Vec::with_capacity(problem.size());
        for alpha in &problem.basis {
            row.push(phi(alpha, beta, &points[*node])?);
        }
        m.push(row);
    }
    Ok(m)
}

/// Exact determinant of a rational matrix (fraction-free elimination).
pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    exact::det_exact(m)
}

fn phi_mod(alpha: &MultiIndex, beta: &MultiIndex, point: &[u64], p: u64) -> u64 {
    if !beta.leq(alpha) {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..alpha.dim() {
        let (a, b) = (alpha.0[i], beta.0[i]);
        for k in 0..b {
            acc = modp::mulmod(acc, (a - k) as u64 % p, p);
        }
        acc = modp::mulmod(acc, modp::powmod(point[i] % p, (a - b) as u64, p), p);
    }
    acc
}

fn matrix_mod(problem: &InterpProblem, points: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = problem.rows();
    rows.iter()
        .map(|(node, beta)| {
            problem
                .basis
                .iter()
                .map(|alpha| phi_mod(alpha, beta, &points[*node], p))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    CertifiedCorrect,
    CertifiedIncorrect,
    ProbablyIncorrect,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictKind::CertifiedCorrect => "certified-correct",
            VerdictKind::CertifiedIncorrect => "certified-incorrect",
            VerdictKind::ProbablyIncorrect => "probably-incorrect",
        };
        f.write_str(s)
    }
}

/// Outcome of generic-correctness testing.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub trials: u32,
    pub prime: Option<u64>,
    pub seed: u64,
    pub degree_bound: u64,
    /// For probabilistic negatives: `(degree_bound / prime)^trials`.
    pub error_bound: Option<BigRational>,
    /// For certified-correct: node coordinates witnessing a nonzero
    /// determinant modulo `prime`.
    pub witness: Option<Vec<Vec<u64>>>,
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        self.kind == VerdictKind::CertifiedCorrect
    }

    pub fn record(&self, problem_hash: &str) -> VerdictRecord {
        VerdictRecord {
            problem: problem_hash.to_string(),
            kind: self.kind,
            prime: self.prime,
            seed: self.seed,
            trials: self.trials,
            degree_bound: self.degree_bound,
            error_bound: self.error_bound.as_ref().map(|b| b.to_string()),
            witness: self.witness.clone(),
        }
    }
}

/// One line of the append-only verdict cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub problem: String,
    pub kind: VerdictKind,
    pub prime: Option<u64>,
    pub seed: u64,
    pub trials: u32,
    pub degree_bound: u64,
    pub error_bound: Option<String>,
    pub witness: Option<Vec<Vec<u64>>>,
}

/// Knobs for the verdict machinery.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub prime: u64,
    pub trials: u32,
    /// Exact symbolic fallback is attempted when the matrix size is at most
    /// this and the number of node coordinates is at most `exact_var_cap`.
    pub exact_threshold: usize,
    pub exact_var_cap: usize,
    pub seed: u64,
    /// Subset-enumeration budget for exceptionality checks.
    pub budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prime: crate::DEFAULT_PRIME,
            trials: 8,
            exact_threshold: 8,
            exact_var_cap: 4,
            seed: 0,
            budget: 10_000_000,
        }
    }
}

fn sample_points(problem: &InterpProblem, config: &RunConfig, stream: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    loop {
        let pts: Vec<Vec<u64>> = (0..problem.node_count())
            .map(|_| {
                (0..problem.dim())
                    .map(|_| rng.gen_range(0..config.prime))
                    .collect()
            })
            .collect();
        let mut dedup = pts.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() == pts.len() {
            return pts;
        }
    }
}

/// Decides generic correctness of a square problem.
///
/// Nonzero determinant at any sampled node set certifies correctness over
/// characteristic zero. After `trials` all-zero evaluations, small problems
/// are settled exactly via the symbolic determinant; larger ones are
/// reported probably-incorrect with error bound `(degree_bound/p)^trials`.
pub fn is_generically_correct(
    problem: &InterpProblem,
    config: &RunConfig,
) -> Result<Verdict, InterpError> {
    let bound = problem.degree_bound();
    if config.prime <= bound {
        return Err(InterpError::PrimeTooSmall {
            prime: config.prime,
            bound,
        });
    }
    for trial in 0..config.trials {
        let pts = sample_points(problem, config, trial as u64);
        let det = modp::det_mod(matrix_mod(problem, &pts, config.prime), config.prime);
        if det != 0 {
            return Ok(Verdict {
                kind: VerdictKind::CertifiedCorrect,
                trials: trial + 1,
                prime: Some(config.prime),
                seed: config.seed,
                degree_bound: bound,
                error_bound: None,
                witness: Some(pts),
            });
        }
    }
    let vars = problem.node_count() * problem.dim();
    if problem.size() <= config.exact_threshold && vars <= config.exact_var_cap {
        if symbolic_det_is_zero(problem) {
            return Ok(Verdict {
                kind: VerdictKind::CertifiedIncorrect,
                trials: config.trials,
                prime: Some(config.prime),
                seed: config.seed,
                degree_bound: bound,
                error_bound: None,
                witness: None,
            });
        }
        // The determinant is a nonzero polynomial although all sampled
        // evaluations vanished; hunt for a witness deterministically.
        for stream in config.trials..config.trials + 64 {
            let pts = sample_points(problem, config, stream as u64);
            let det = modp::det_mod(matrix_mod(problem, &pts, config.prime), config.prime);
            if det != 0 {
                return Ok(Verdict {
                    kind: VerdictKind::CertifiedCorrect,
                    trials: stream + 1,
                    prime: Some(config.prime),
                    seed: config.seed,
                    degree_bound: bound,
                    error_bound: None,
                    witness: Some(pts),
                });
            }
        }
        return Err(InterpError::WitnessSearchFailed);
    }
    let ratio = BigRational::new(BigInt::from(bound), BigInt::from(config.prime));
    let eb = num_traits::pow::Pow::pow(&ratio, config.trials as i32);
    Ok(Verdict {
        kind: VerdictKind::ProbablyIncorrect,
        trials: config.trials,
        prime: Some(config.prime),
        seed: config.seed,
        degree_bound: bound,
        error_bound: Some(eb),
        witness: None,
    })
}

/// Expands `det M` exactly as a polynomial in the flattened node
/// coordinates. Every matrix entry is a single monomial, so the permutation
/// expansion accumulates exact term coefficients.
fn symbolic_terms(problem: &InterpProblem) -> HashMap<Vec<u32>, BigInt> {
    let rows = problem.rows();
    let c = rows.len();
    let n = problem.dim();
    let mut entries: Vec<Vec<Option<(BigInt, Vec<u32>)>>> = Vec::with_capacity(c);
    for (node, beta) in &rows {
        let mut row = Vec::with_capacity(c);
        for alpha in &problem.basis {
            if !beta.leq(alpha) {
                row.push(None);
                continue;
            }
            let mut coeff = BigInt::one();
            let mut exps = vec![0u32; problem.node_count() * n];
            for i in 0..n {
                let (a, b) = (alpha.0[i], beta.0[i]);
                for k in 0..b {
                    coeff *= BigInt::from(a - k);
                }
                exps[node * n + i] = a - b;
            }
            row.push(Some((coeff, exps)));
        }
        entries.push(row);
    }

    fn expand(
        entries: &[Vec<Option<(BigInt, Vec<u32>)>>],
        row: usize,
        used: &mut Vec<bool>,
        coeff: &BigInt,
        exps: &[u32],
        sign: i8,
        terms: &mut HashMap<Vec<u32>, BigInt>,
    ) {
        let c = entries.len();
        if row == c {
            let t = terms.entry(exps.to_vec()).or_insert_with(BigInt::zero);
            if sign > 0 {
                *t += coeff;
            } else {
                *t -= coeff;
            }
            return;
        }
        let mut skipped = 0u32;
        for col in 0..c {
            if used[col] {
                continue;
            }
            if let Some((ec, ee)) = &entries[row][col] {
                let nc = coeff * ec;
                let mut ne = exps.to_vec();
                for (x, y) in ne.iter_mut().zip(ee) {
                    *x += y;
                }
                used[col] = true;
                let nsign = if skipped % 2 == 0 { sign } else { -sign };
                expand(entries, row + 1, used, &nc, &ne, nsign, terms);
                used[col] = false;
            }
            skipped += 1;
        }
    }

    let mut terms = HashMap::new();
    let mut used = vec![false; c];
    expand(
        &entries,
        0,
        &mut used,
        &BigInt::one(),
        &vec![0u32; problem.node_count() * n],
        1,
        &mut terms,
    );
    terms
}

fn symbolic_det_is_zero(problem: &InterpProblem) -> bool {
    symbolic_terms(problem).values().all(|v| v.is_zero())
}

/// Total degree of `det M` as a polynomial, from the exact expansion.
/// Exposed for degree-bound tests on small instances.
pub fn symbolic_det_degree(problem: &InterpProblem) -> Option<u64> {
    if problem.size() > 9 {
        return None;
    }
    symbolic_terms(problem)
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, _)| e.iter().map(|&x| x as u64).sum())
        .max()
}

/// The one-node rank test: the problem `({F_d^n}, B)` is generically
/// correct iff the exponent points of `B` do not lie on a hypersurface of
/// degree `d - 1`.
pub fn one_point_correct(exponents: &[MultiIndex], d: u32, n: usize) -> Result<bool, InterpError> {
    let expected = FerrersDiagram::full_triangle(d, n).cardinality();
    if exponents.len() != expected {
        return Err(InterpError::WrongCardinality {
            expected,
            got: exponents.len(),
        });
    }
    if exponents.iter().any(|e| e.dim() != n) {
        return Err(InterpError::DimensionMismatch);
    }
    let mut monos = FerrersDiagram::full_triangle(d, n).points().to_vec();
    monos.sort_by(graded_cmp);
    let m: Vec<Vec<i128>> = exponents
        .iter()
        .map(|pt| {
            monos
                .iter()
                .map(|mono| {
                    mono.0
                        .iter()
                        .zip(&pt.0)
                        .map(|(&e, &x)| (x as i128).pow(e))
                        .product()
                })
                .collect()
        })
        .collect();
    Ok(!exact::det_int(&m).is_zero())
}

/// Greedy generic-basis extraction: walk monomials in graded order, keeping
/// each one that enlarges the rank of the condition-evaluation matrix at
/// random prime-field nodes. Returns the basis together with a
/// certified-correct verdict for it.
pub fn generic_basis(
    conditions: &[FerrersDiagram],
    config: &RunConfig,
) -> Result<(Vec<MultiIndex>, Verdict), InterpError> {
    let c: usize = conditions.iter().map(|f| f.cardinality()).sum();
    let dim = conditions.first().map(|f| f.dim()).unwrap_or(2);
    for attempt in 0..8u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::MAX - attempt);
        let points: Vec<Vec<u64>> = (0..conditions.len())
            .map(|_| (0..dim).map(|_| rng.gen_range(0..config.prime)).collect())
            .collect();

        let rows: Vec<(usize, MultiIndex)> = conditions
            .iter()
            .enumerate()
            .flat_map(|(i, f)| {
                let mut betas = f.points().to_vec();
                betas.sort_by(graded_cmp);
                betas.into_iter().map(move |b| (i, b))
            })
            .collect();

        let mut tracker = RankTracker::new(config.prime);
        let mut basis = Vec::with_capacity(c);
        let mut deg = 0u32;
        while basis.len() < c && (deg as u64) <= problem_degree_cap(c) {
            let mut level = compositions(deg, dim);
            level.sort_by(graded_cmp);
            for alpha in level {
                if basis.len() == c {
                    break;
                }
                let col: Vec<u64> = rows
                    .iter()
                    .map(|(node, beta)| phi_mod(&alpha, beta, &points[*node], config.prime))
                    .collect();
                if tracker.insert(col) {
                    basis.push(alpha);
                }
            }
            deg += 1;
        }
        if basis.len() < c {
            continue;
        }
        let problem = InterpProblem::new(conditions.to_vec(), basis.clone())?;
        let verdict = is_generically_correct(&problem, config)?;
        if verdict.is_correct() {
            return Ok((problem.basis.clone(), verdict));
        }
    }
    Err(InterpError::WitnessSearchFailed)
}

fn problem_degree_cap(c: usize) -> u64 {
    // Any c independent conditions are spanned within degree c.
    c as u64 + 2
}
