//! File formats, batch commands and benchmarks around `gridwarp-core`.
//!
//! The library side exists so the integration and acceptance suites can
//! drive the exact code the `gridwarp` binary runs.

use std::fmt;

pub mod bench;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod pgm;
pub mod report;
pub mod svg;

/// Command-level errors, split by exit code: configuration/usage problems
/// exit 2, pipeline failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Pipeline(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn pipeline(msg: impl Into<String>) -> Self {
        CliError::Pipeline(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Pipeline(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Pipeline(msg) => write!(f, "pipeline error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Bound the global rayon pool by `GRIDWARP_THREADS` (ignored when unset or
/// unparseable; rayon then picks its default).
pub fn init_thread_pool() {
    if let Ok(value) = std::env::var("GRIDWARP_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                // Ignore the error if a pool (e.g. in tests) already exists.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}
