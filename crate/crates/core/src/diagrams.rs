//! Ferrers diagrams in `N^n` and staircase diagrams in the plane.
//!
//! A staircase diagram is stored as its expanded type: the vector of level
//! widths `(t_1, ..., t_m)` where level `i` holds the points of total degree
//! `i - 1` with second coordinate below `t_i`. Trailing zero levels are
//! trimmed, so equality of diagrams is equality of types.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("not a diagram type: level {level} has width {width} > {level}")]
    LevelOverfull { level: usize, width: u32 },
    #[error("not a diagram type: level {level} is not downward closed")]
    NotFerrers { level: usize },
    #[error("point set is not downward closed")]
    NotDownwardClosed,
    #[error("more than {0} steps")]
    MoreThanSteps(u32),
    #[error("empty dimension")]
    EmptyDimension,
    #[error("mixed dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected a full triangle, got a diagram with a step")]
    NotATriangle,
    #[error("parse error at byte {0}: {1}")]
    Parse(usize, String),
}

/// Exponent vector in `N^n`; also used for derivative orders and as an
/// integer lattice point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|alpha|`.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise partial order: `self <= other` iff the difference has
    /// no negative entry.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

/// Finite downward-closed subset of `N^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FerrersDiagram {
    points: Vec<MultiIndex>,
    dim: usize,
}

impl FerrersDiagram {
    /// Builds a diagram from a point set, rejecting sets that are not
    /// downward closed.
    pub fn new(points: Vec<MultiIndex>) -> Result<Self, DiagramError> {
        let dim = points.first().map(|p| p.dim()).unwrap_or(1);
        if dim == 0 {
            return Err(DiagramError::EmptyDimension);
        }
        for p in &points {
            if p.dim() != dim {
                return Err(DiagramError::DimensionMismatch(dim, p.dim()));
            }
        }
        let set: BTreeSet<&MultiIndex> = points.iter().collect();
        if set.len() != points.len() {
            return Err(DiagramError::NotDownwardClosed);
        }
        for p in &points {
            for coord in 0..dim {
                if p.0[coord] > 0 {
                    let mut below = p.clone();
                    below.0[coord] -= 1;
                    if !set.contains(&below) {
                        return Err(DiagramError::NotDownwardClosed);
                    }
                }
            }
        }
        let mut points = points;
        points.sort();
        Ok(FerrersDiagram { points, dim })
    }

    /// The full triangle `F_d^n = { alpha : |alpha| < d }`.
    pub fn full_triangle(d: u32, n: usize) -> Self {
        assert!(d >= 1 && n >= 1);
        let mut points = Vec::new();
        let mut cur = vec![0u32; n];
        loop {
            if cur.iter().map(|&e| e as u64).sum::<u64>() < d as u64 {
                points.push(MultiIndex(cur.clone()));
            }
            // odometer over [0, d)^n
            let mut i = 0;
            loop {
                if i == n {
                    points.sort();
                    return FerrersDiagram { points, dim: n };
                }
                cur[i] += 1;
                if cur[i] < d {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    pub fn points(&self) -> &[MultiIndex] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }
}

/// A staircase type: the sequence `(a_1, ..., a_k)` of level widths, with an
/// optional compressed prefix `(~a, a_1, ..., a_m)` standing for
/// `(1, 2, ..., a, a_1, ..., a_m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseType {
    entries: Vec<u32>,
}

impl StaircaseType {
    /// Expanded form. Entries are validated only when realized via
    /// [`StaircaseDiagram::from_type`].
    pub fn expanded(entries: Vec<u32>) -> Self {
        StaircaseType { entries }
    }

    /// Compressed form `(~prefix, rest...)` = `(1, 2, ..., prefix, rest...)`.
    pub fn compressed(prefix: u32, rest: Vec<u32>) -> Self {
        let mut entries: Vec<u32> = (1..=prefix).collect();
        entries.extend(rest);
        StaircaseType { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

impl fmt::Display for StaircaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut a = 0usize;
        while a < self.entries.len() && self.entries[a] == a as u32 + 1 {
            a += 1;
        }
        if self.entries.is_empty() {
            return write!(f, "(0)");
        }
        let mut parts: Vec<String> = Vec::new();
        let rest = if a >= 2 {
            parts.push(format!("~{}", a));
            &self.entries[a..]
        } else {
            &self.entries[..]
        };
        parts.extend(rest.iter().map(|e| e.to_string()));
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for StaircaseType {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| DiagramError::Parse(0, "expected parenthesized type".into()))?;
        if inner.trim() == "0" {
            return Ok(StaircaseType::expanded(vec![]));
        }
        let mut entries: Vec<u32> = Vec::new();
        for (i, tok) in inner.split(',').enumerate() {
            let tok = tok.trim();
            if i == 0 {
                if let Some(p) = tok.strip_prefix('~') {
                    let a: u32 = p
                        .parse()
                        .map_err(|_| DiagramError::Parse(1, format!("bad prefix {tok:?}")))?;
                    entries.extend(1..=a);
                    continue;
                }
            }
            let v: u32 = tok
                .parse()
                .map_err(|_| DiagramError::Parse(i, format!("bad entry {tok:?}")))?;
            entries.push(v);
        }
        Ok(StaircaseType::expanded(entries))
    }
}

/// The split of a staircase diagram as `(~a, w_1, ..., w_d)`: a full
/// triangular prefix of height `a` followed by exactly `d` trailing levels.
/// Trailing entries may borrow from the staircase prefix, so they need not
/// be bounded by `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedSplit {
    pub prefix: u32,
    pub trailing: Vec<u32>,
}

/// Planar staircase diagram, canonically stored as its expanded type with
/// trailing zero levels trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StaircaseDiagram {
    levels: Vec<u32>,
}

impl StaircaseDiagram {
    /// Realizes a type as a diagram. Fails on over-full levels
    /// (`a_i > i`) and on types whose point set is not downward closed.
    pub fn from_type(t: &StaircaseType) -> Result<Self, DiagramError> {
        let mut levels = t.entries.clone();
        while levels.last() == Some(&0) {
            levels.pop();
        }
        for (i, &w) in levels.iter().enumerate() {
            if w > i as u32 + 1 {
                return Err(DiagramError::LevelOverfull {
                    level: i + 1,
                    width: w,
                });
            }
        }
        // Downward closure: level i-1 must cover everything level i forces.
        for i in 1..levels.len() {
            if levels[i - 1] < levels[i].min(i as u32) {
                return Err(DiagramError::NotFerrers { level: i + 1 });
            }
        }
        Ok(StaircaseDiagram { levels })
    }

    /// The empty diagram, of type `(0)`.
    pub fn empty() -> Self {
        StaircaseDiagram { levels: vec![] }
    }

    /// The full triangle `F_d` as a staircase diagram, of type `(~d)`.
    pub fn full_triangle(d: u32) -> Self {
        StaircaseDiagram {
            levels: (1..=d).collect(),
        }
    }

    /// The unique diagram with at most one step of the given cardinality:
    /// the largest full triangle plus one partial level.
    pub fn one_step(cardinality: u64) -> Self {
        let mut a = 0u32;
        while crate::triangle(a + 1) <= cardinality {
            a += 1;
        }
        let r = (cardinality - crate::triangle(a)) as u32;
        let mut levels: Vec<u32> = (1..=a).collect();
        if r > 0 {
            levels.push(r);
        }
        StaircaseDiagram { levels }
    }

    /// Level widths of the expanded type, trailing zeros trimmed.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn cardinality(&self) -> u64 {
        self.levels.iter().map(|&w| w as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The expanded type of this diagram.
    pub fn to_type(&self) -> StaircaseType {
        StaircaseType::expanded(self.levels.clone())
    }

    /// Materializes the planar point set: level `i` holds `(x, y)` with
    /// `x + y = i - 1` and `y < t_i`.
    pub fn points(&self) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        for (i, &w) in self.levels.iter().enumerate() {
            let deg = i as u32;
            for y in 0..w {
                out.push(MultiIndex(vec![deg - y, y]));
            }
        }
        out
    }

    /// Realizes the diagram as a downward-closed point set in `N^2`.
    pub fn to_ferrers(&self) -> FerrersDiagram {
        FerrersDiagram::new(self.points()).expect("staircase diagrams are downward closed")
    }

    /// Splits the type so that exactly `d` entries follow a full triangular
    /// prefix `(1, ..., a)`. Fails when the diagram has more than `d` steps.
    pub fn normalize_for_d(&self, d: u32) -> Result<NormalizedSplit, DiagramError> {
        let d = d as usize;
        let m = self.levels.len();
        if m <= d {
            let mut trailing = self.levels.clone();
            trailing.resize(d, 0);
            return Ok(NormalizedSplit {
                prefix: 0,
                trailing,
            });
        }
        let a = m - d;
        for (i, &w) in self.levels[..a].iter().enumerate() {
            if w != i as u32 + 1 {
                return Err(DiagramError::MoreThanSteps(d as u32));
            }
        }
        Ok(NormalizedSplit {
            prefix: a as u32,
            trailing: self.levels[a..].to_vec(),
        })
    }

    /// Minimal number of steps: the least `k` such that the diagram is of
    /// type `(~a, a_1, ..., a_k)` with `a >= a_1 >= ... >= a_k > 0`. Past the
    /// maximal full prefix no level of a valid diagram can be full, so the
    /// tail is automatically non-increasing and bounded by the prefix height.
    pub fn step_count(&self) -> u32 {
        let m = self.levels.len();
        let mut full = 0usize;
        while full < m && self.levels[full] == full as u32 + 1 {
            full += 1;
        }
        (m - full) as u32
    }

    /// True iff `d(d+1)/2` divides the cardinality and the diagram has at
    /// most `d` steps.
    pub fn is_d_diagram(&self, d: u32) -> bool {
        self.cardinality() % crate::triangle(d) == 0 && self.step_count() <= d
    }

    /// Properness of a diagram with at most `d` steps: the prefix height is
    /// at least `d` and equal adjacent trailing entries are at least `d`.
    pub fn is_proper(&self, d: u32) -> Result<bool, DiagramError> {
        let split = self.normalize_for_d(d)?;
        if split.prefix < d {
            return Ok(false);
        }
        Ok(split.trailing.windows(2).all(|w| w[0] != w[1] || w[0] >= d))
    }

    /// A proper diagram is safely proper when the prefix height is at least
    /// `2d` and the last trailing entry is positive.
    pub fn is_safely_proper(&self, d: u32) -> Result<bool, DiagramError> {
        if !self.is_proper(d)? {
            return Ok(false);
        }
        let split = self.normalize_for_d(d)?;
        Ok(split.prefix >= 2 * d && *split.trailing.last().unwrap() > 0)
    }

    /// The union diagram `F_S` of a sequence of full triangles: row `y`
    /// of the result has width `sum_i max(0, d_i - y)`.
    pub fn f_s(orders: &[u32]) -> Result<Self, DiagramError> {
        if orders.iter().any(|&d| d == 0) {
            return Err(DiagramError::NotATriangle);
        }
        let max_d = orders.iter().copied().max().unwrap_or(0);
        let rows: Vec<u64> = (0..max_d)
            .map(|y| {
                orders
                    .iter()
                    .map(|&d| (d as u64).saturating_sub(y as u64))
                    .sum()
            })
            .collect();
        let height = rows.len();
        let max_deg = if height == 0 {
            0
        } else {
            rows[0] as usize + height - 1
        };
        let mut levels = vec![0u32; max_deg];
        for (deg, width) in levels.iter_mut().enumerate() {
            let mut n = 0u32;
            for (y, &row_w) in rows.iter().enumerate() {
                if y <= deg && ((deg - y) as u64) < row_w {
                    n += 1;
                }
            }
            *width = n;
        }
        StaircaseDiagram::from_type(&StaircaseType::expanded(levels))
    }

    /// Checks that a sequence of n=2 Ferrers diagrams are all full triangles
    /// and returns their orders.
    pub fn triangle_orders(diagrams: &[FerrersDiagram]) -> Result<Vec<u32>, DiagramError> {
        diagrams
            .iter()
            .map(|f| {
                if f.dim() != 2 {
                    return Err(DiagramError::DimensionMismatch(2, f.dim()));
                }
                let c = f.cardinality() as u64;
                let mut d = 0u32;
                while crate::triangle(d) < c {
                    d += 1;
                }
                if crate::triangle(d) != c || *f != FerrersDiagram::full_triangle(d, 2) {
                    return Err(DiagramError::NotATriangle);
                }
                Ok(d)
            })
            .collect()
    }
}

impl fmt::Display for StaircaseDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_type().fmt(f)
    }
}

impl FromStr for StaircaseDiagram {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: StaircaseType = s.parse()?;
        StaircaseDiagram::from_type(&t)
    }
}
