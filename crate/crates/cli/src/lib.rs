//! Command-line front end for `pencil-core`: JSON scene configs, bundled
//! presets and the `build`, `verify`, `classify` and `synthesize` commands.

pub mod commands;
pub mod config;
pub mod presets;

pub use commands::{run, Command, Outcome, RunOptions};
pub use config::{Num, Scene, SceneConfig};

use thiserror::Error;

/// A command failure, carrying the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Failure {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("infeasible constant: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Numerical(_) | Failure::Io(_) => 4,
        }
    }
}
