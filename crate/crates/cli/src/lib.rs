//! Experiment runner for the Anderson–Bernoulli laboratory: JSON
//! configuration, subcommand orchestration, a content-addressed cache and
//! run reports.

pub mod cache;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use cache::{Cache, CacheEvent, CacheOutcome, CACHE_ENV};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::RunReport;
pub use run::{run, Command};
