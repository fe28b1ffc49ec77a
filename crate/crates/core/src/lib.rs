//! On-the-fly erasure decoding of parallel turbo codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`trellis`]: RSC constituent codes, their state-transition tables and the
//!   label-constraint lookup masks.
//! - [`turbo`]: interleavers, puncturing and the parallel turbo encoder.
//! - [`otf`]: the symbol-at-a-time trellis propagation decoder.
//! - [`ldpc`]: staircase LDPC comparison codes with a peeling decoder.
//! - [`sim`]: Monte-Carlo inefficiency measurement and sweeps.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod error;
pub mod ldpc;
pub mod otf;
pub mod rate;
pub mod sim;
pub mod trellis;
pub mod turbo;

pub use error::{Error, Result};
pub use rate::Rate;

/// Progress of an erasure decoder after a reception.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    /// Some information symbols are still undetermined.
    InProgress,
    /// Every information symbol is determined.
    Success,
    /// The received values are inconsistent with every codeword.
    Contradiction,
}

impl std::fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DecodeStatus::InProgress => "in-progress",
            DecodeStatus::Success => "success",
            DecodeStatus::Contradiction => "contradiction",
        };
        f.write_str(s)
    }
}
