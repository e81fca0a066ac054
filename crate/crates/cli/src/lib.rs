//! Problem-file front end for `varitri-core`: parses a JSON problem,
//! dispatches one command and renders a deterministic report.

pub mod commands;
pub mod problem;
pub mod report;

pub use commands::{run, Command, Options};
pub use problem::ProblemFile;
pub use report::{Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] varitri_core::Error),
}
