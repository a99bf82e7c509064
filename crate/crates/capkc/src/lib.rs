//! File formats, JSON output, the benchmark harness and the command-line
//! interface for the `capkc-core` solvers.

pub mod bench;
pub mod cli;
pub mod format;
pub mod json;
pub mod tree_format;
pub mod verify;

pub use format::{parse_instance, serialize_instance, ParseError};
pub use json::{solution_from_json, solution_to_json};
