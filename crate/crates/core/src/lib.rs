//! Exact weighted first-order model counting for two-variable logic with
//! counting quantifiers, over domains `{1..n}` with per-predicate symmetric
//! weights, plus:
//!
//! * an `EssentialDAG(R, d)` axiom restricting a distinguished binary relation
//!   to essential DAGs (every edge protected) with indegree at most `d`,
//! * a specialized indegree census of essential DAGs, and
//! * a brute-force oracle for small instances.
//!
//! All arithmetic is exact (arbitrary-precision rationals); no counting path
//! ever touches floating point.

pub mod arith;
pub mod cells;
pub mod census;
pub mod engine;
pub mod essential;
pub mod logic;
pub mod normal;
pub mod oracle;
pub mod parse;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed formula text. `pos` is a byte offset into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// Predicate used but not declared.
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    /// Predicate used with the wrong number of arguments.
    #[error("arity mismatch for `{name}`: declared {declared}, used with {used}")]
    ArityMismatch {
        name: String,
        declared: u8,
        used: u8,
    },
    /// Sentences may use at most two distinct variables.
    #[error("more than two distinct variables: `{0}`")]
    ThirdVariable(String),
    /// Well-formed input outside the supported fragment.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Brute-force instance too large to enumerate.
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// Any other invalid request (bad vocabulary, bad constraint, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An internal invariant failed; results would be unsound.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
