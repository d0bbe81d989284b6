//! Orchestration of the pipeline: parameter resolution, the check battery, the level-by-level
//! construction with its persisted manifests, and the measurement report.

mod commands;
mod config;
mod files;

pub use commands::{
    cmd_build, cmd_params, cmd_report, cmd_verify, load_level, BuildOutcome, FileEntry, ParamsReport, Report, RunManifest, LEVEL_ORDER_REF, RASTER_WIDTH,
};
pub use config::{resolve, Auto, DomainKind, Origin, Origins, PointName, PointSpec, Resolved, RunConfig, SourceKind, Tolerances, DEFAULT_LEVELS};
pub use files::{level_dir, write_atomic};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(
        "p = 2 is refused: the equation is then the Laplace equation, whose distributional \
         solutions are smooth by Weyl's lemma, and G_2 is identically 1 so no c is admissible; \
         pass --allow-p2 for a diagnostic run"
    )]
    P2,
    #[error(transparent)]
    Core(#[from] stairlam_core::CoreError),
    #[error(transparent)]
    Verify(#[from] stairlam_verify::VerifyError),
    #[error(transparent)]
    Construct(#[from] stairlam_construct::ConstructError),
    #[error(transparent)]
    Analysis(#[from] stairlam_analysis::AnalysisError),
    #[error("check battery failed: {0}")]
    VerifyFailed(String),
    #[error("missing file {0}")]
    Missing(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
