//! Experiment harness: configuration, the `fineness`, `ratio` and `verify`
//! experiments, and their CSV outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use commands::{cmd_construct, cmd_fineness, cmd_ratio, cmd_trace, FinenessOutcome, RatioOutcome};
pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use verify::{cmd_verify, run_verify, VerifyReport};
