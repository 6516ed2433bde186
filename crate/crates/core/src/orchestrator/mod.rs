//! Experiment runs and configuration sweeps.
//!
//! A run walks every prediction target of a dataset: select transcripts,
//! render the prompt, complete it, parse the emotion and record the result.
//! Runs checkpoint per utterance and can be resumed. Sweeps expand a grid of
//! strategies, context windows and constant-budget fusion blocks into runs
//! and tabulate their reports.

mod config;
mod run;
mod sweep;

use std::path::PathBuf;

pub use config::{BootstrapConfig, ExperimentConfig, Fallback, ParsePolicy, Seeds, TransportConfig};
pub use run::{
    dataset_digest, evaluate_run_dir, predictions_jsonl, read_predictions, run_dir_for, run_experiment,
    run_experiment_with, ExperimentOutcome, CHECKPOINT_FILE, CONFIG_FILE, PREDICTIONS_FILE, REPORT_JSON, REPORT_TEXT,
};
pub use sweep::{
    rebuild_sweep, run_id, run_sweep, write_tables, FusionBlock, GridPoint, SweepAxes, SweepGrid, SweepOutcome,
    SweepRun, SweepTables, CW_TABLE, DEFAULT_CWS, FUSION_CSV, FUSION_TABLE, HEURISTIC_CSV, RANKING_CSV, RUNS_CSV,
    SWEEP_FILE,
};

use crate::corpus::LoadError;
use crate::evaluation::EvalError;
use crate::gateway::GatewayError;
use crate::promptgen::PromptError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("transport unavailable: {0}")]
    Transport(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("run aborted after {completed}/{total} utterances (resume from {}): {cause}", checkpoint.display())]
    Aborted {
        completed: usize,
        total: usize,
        checkpoint: PathBuf,
        cause: Box<RunError>,
    },
}

impl RunError {
    /// The innermost error, looking through [`RunError::Aborted`].
    pub fn root(&self) -> &RunError {
        match self {
            RunError::Aborted { cause, .. } => cause.root(),
            other => other,
        }
    }
}
