//! Exact LP-rounding approximation algorithms for the capacitated k-center
//! problem and three of its variants: k-supplier, budgeted uniform-capacity
//! centers, and instances whose capacities are all `0` or a single `L`.
//!
//! Everything is computed over exact rationals. Every rounding step is
//! re-verified: opening vectors are checked as distance-`r` transfers by a
//! max-flow reduction, assignments are extracted by bipartite flow, and the
//! final radius is compared against the certified lower bound `tau_star`.
//!
//! The crate is `no_std` (it needs `alloc`). Parsing, JSON and the CLI live in
//! the companion `capkc` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod extensions;
pub mod flow;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod reduce;
pub mod transfer;
pub mod tree;
pub mod zerol;

pub use error::{Error, Result};
pub use graph::{Component, Graph, ThresholdGraph};
pub use instance::{InstanceError, MetricInstance};
pub use pipeline::{solve, SearchMode, SolveOptions, Solution, Variant};
pub use rational::Rational;
pub use transfer::{Assignment, TransferVector, Verdict};
pub use tree::TreeInstance;
