//! Combinatorial designs, their q-analogs, and the binary matrices they induce
//! for coded caching and coded MapReduce data shuffling.
//!
//! The pipeline is: build a design ([`designs`], [`subspace`]), derive a
//! labeled 0/1 matrix together with a non-overlapping identity-submatrix
//! cover ([`binmat`]), then either run a broadcast caching scheme over the
//! matrix ([`caching`]) or a map/shuffle/reduce simulation ([`mapreduce`]),
//! with or without straggling nodes. The [`cli`] module wraps everything as
//! batch subcommands and emits the numeric comparison tables as CSV.

pub mod binmat;
pub mod caching;
pub mod cli;
pub mod designs;
pub mod gf;
pub mod mapreduce;
pub mod rat;
pub mod subspace;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {0} exceeds cap {1}")]
    FieldTooLarge(u64, u64),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element {0} out of range for GF({1})")]
    ElementRange(u32, u32),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("non-integral value for {what}: {num}/{den}")]
    NonIntegral {
        what: &'static str,
        num: u128,
        den: u128,
    },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("enumeration size {0} exceeds cap {1} (set DESIGNCODED_CAP to raise)")]
    CapExceeded(u64, u64),
    #[error("design verification failed: {0}")]
    InvalidDesign(String),
    #[error("cover verification failed: {0}")]
    InvalidCover(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration cap used by subspace listing and matrix cross-checks.
/// `DESIGNCODED_CAP` overrides the default of 10^6.
pub fn enumeration_cap() -> u64 {
    std::env::var("DESIGNCODED_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000)
}
