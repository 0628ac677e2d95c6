//! Experiment orchestration for `fracpq-core`: TOML configs, CSV artifacts,
//! markdown reports and the acceptance criteria.

pub mod artifacts;
pub mod config;
pub mod criteria;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod sweep;

pub use config::{ExperimentConfig, ExperimentKind, Settings};
pub use error::{Error, Result};
pub use pipeline::{run, RunOutcome};
