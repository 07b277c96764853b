//! Experiment harness: TOML configs in, provenance-stamped CSV/JSON tables out.
//!
//! Every experiment is a pure function of its config and seed. Rows are
//! computed in parallel, each from its own random stream, and merged in
//! config order, so reruns are byte-identical.

pub mod config;
pub mod distinguish;
pub mod experiment;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind, Format};
pub use distinguish::{distinguish, DistinguishabilityReport, Statistic};
pub use experiment::run_experiment;
pub use table::{emit_table, render, Provenance, ResultTable, Table, Value};

use std::path::PathBuf;

pub const TOOL_NAME: &str = "istbench";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Relative output paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "ISTBENCH_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    /// Process exit code: 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
