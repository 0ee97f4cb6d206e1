//! Deciding, certifying and enumerating generically correct multivariate
//! Hermite interpolation problems on staircase diagrams.
//!
//! The library is organized around the reduction calculus for staircase
//! diagrams in the plane: diagram construction and predicates
//! ([`diagrams`]), the reduction engine ([`reduction`]), exact and modular
//! linear algebra for correctness verdicts ([`interp`]), exhaustive diagram
//! enumeration and base-case verification ([`enumerate`]), and closed-form
//! bounds together with the search for exact singularity thresholds
//! ([`bounds`]).

pub mod bounds;
pub mod diagrams;
pub mod enumerate;
pub mod exact;
pub mod interp;
pub mod modp;
pub mod reduction;

pub use diagrams::{FerrersDiagram, MultiIndex, StaircaseDiagram, StaircaseType};
pub use interp::{InterpProblem, RunConfig, Verdict, VerdictKind};
pub use reduction::{ReductionChain, ReductionStep, VSequence};

/// Default prime for modular certification: the largest 62-bit prime.
pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;

/// Triangular number d(d+1)/2, the cardinality of one order-d node condition.
pub fn triangle(d: u32) -> u64 {
    (d as u64) * (d as u64 + 1) / 2
}

/// Caps the global worker pool; call once, before any parallel work.
pub fn build_thread_pool(threads: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
}
