//! Experiment runner for the `qunforge` workbench: manifests, sweeps and the
//! acceptance suite.

pub mod acceptance;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod reproduce;
pub mod run;
pub mod sweep;

pub use error::{CliError, Result};
pub use manifest::ExperimentManifest;
