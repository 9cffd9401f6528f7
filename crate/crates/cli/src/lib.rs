//! Config-driven experiment runner for `birkdist-core`.
//!
//! Every command reads one TOML [`ExperimentConfig`], computes in memory and,
//! only on success, writes its CSV and JSON files plus a `manifest.json` with
//! checksums into the output directory.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 invalid config, input
//! or usage (including report conflicts), 3 violated precondition, 4
//! numerical failure, 5 unsupported combination.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod validate;

pub use commands::{Command, CommandRegistry};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::{Artifacts, RunManifest};
