//! Workbench for finite concept spaces.
//!
//! The library computes VC-theoretic quantities exactly (shattering, VC
//! dimension, shatter coefficients, maximum/maximal classification),
//! represents and verifies sample compression schemes in their plain,
//! labelled, and copy variants, constructs schemes by exhaustive search
//! and by the standard transformations (labelling, restriction, copy
//! widening, covers), evaluates the associated sample-complexity bound
//! formulas with exact integer binomials, and validates the PAC
//! guarantees by seeded Monte-Carlo simulation.
//!
//! Everything is deterministic: searches use fixed variable and value
//! orders, simulations derive per-trial seeds from a documented 64-bit
//! generator, and identical inputs produce byte-identical outputs.

pub mod bits;
pub mod bounds;
pub mod cli;
pub mod compress;
pub mod corespace;
pub mod fixtures;
pub mod pacsim;
pub mod vcdim;

/// Version stamp carried in every JSON payload and emitted file.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bit-vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate point name {0:?}")]
    DuplicatePoint(String),
    #[error("domain must not be empty")]
    EmptyDomain,
    #[error("concept class must not be empty")]
    EmptyConcepts,
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("subset must not be empty")]
    EmptySubset,
    #[error("{what} is capped at {limit}, got {actual}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("vc dimension is {actual}, expected {expected}")]
    VcMismatch { expected: usize, actual: usize },
    #[error("missing parameter {0}")]
    MissingParam(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("scheme fails verification: {0}")]
    SchemeInvalid(String),
    #[error("widening infeasible: {0}")]
    Infeasible(String),
    #[error("no subset-respecting matching: {0}")]
    MatchingFailed(String),
    #[error("cover does not contain the class: {0}")]
    CoverageGap(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
