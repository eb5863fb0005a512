//! Decomposition toolkit for process-design MINLPs.
//!
//! The discrete configuration subproblem is modeled as a constrained
//! binary program ([`ip`]), compiled to a QUBO ([`reformulate`], [`qubo`]),
//! and handed to interchangeable engines ([`solvers`]). Sample sets are
//! scored with time-to-target and diversity metrics ([`metrics`]). The
//! continuous subproblem at fixed binaries is handled by a direct-search
//! evaluator in [`flowsheets`], which also builds the two bundled case
//! studies (ionic-liquid reactor/separator network and drug-substance
//! manufacturing superstructure).

pub mod error;
pub mod flowsheets;
pub mod ip;
pub mod metrics;
pub mod qubo;
pub mod reformulate;
pub mod solvers;

pub use error::{Error, Result};

/// Absolute tolerance used for feasibility and optimum classification.
pub const TOL: f64 = 1e-9;

/// Formats a bit vector as a `0`/`1` string, index 0 first.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `0`/`1` string into a bit vector.
pub fn bits_from_str(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Schema(format!("invalid bit character {other:?}"))),
        })
        .collect()
}
