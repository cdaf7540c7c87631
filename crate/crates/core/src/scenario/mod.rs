//! Datasets, scenario runs and report exports.

mod dataset;
mod export;
mod import;
mod run;

pub use dataset::{
    load_dataset, parse_dataset, BusRecord, ClassRecord, Dataset, DatasetFile, FeederRecord,
    LineRecord, ObservedDamage, ObservedRecord,
};
pub use export::{
    export_heatmap, export_ranking, heatmap_dot, read_ranking_csv, write_ranking_csv,
    write_ranking_json, write_sweep_csv, ExportFormat, RankingRow, RANKING_HEADER,
};
pub use import::import_tables;
pub use run::{
    load_observed_damage, run_assessment, wind_sweep, DamageInput, FeederSweep, ScenarioConfig,
    SweepRow,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::damage::DamageError;
use crate::fragility::FragilityError;
use crate::grid::GridError;

/// What a dataset failed to satisfy.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Invalid {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Fragility(#[from] FragilityError),
    #[error(transparent)]
    Damage(#[from] DamageError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: parse error: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}:{line}:{column}: schema error: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {location}: {source}")]
    Validation {
        path: PathBuf,
        location: String,
        #[source]
        source: Invalid,
    },
    #[error("invalid scenario configuration: {0}")]
    Config(String),
    #[error("invalid sweep range: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Damage(#[from] DamageError),
}

impl ScenarioError {
    /// Process exit code: 2 for unreadable or malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. }
            | ScenarioError::Parse { .. }
            | ScenarioError::Schema { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn from_json(path: &std::path::Path, err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let (line, column, message) = (err.line(), err.column(), err.to_string());
        let path = path.to_path_buf();
        match err.classify() {
            Category::Io => ScenarioError::Io {
                path,
                source: err.into(),
            },
            Category::Data => ScenarioError::Schema {
                path,
                line,
                column,
                message,
            },
            Category::Syntax | Category::Eof => ScenarioError::Parse {
                path,
                line,
                column,
                message,
            },
        }
    }

    pub(crate) fn from_csv(path: &std::path::Path, err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
        let message = err.to_string();
        match err.into_kind() {
            csv::ErrorKind::Io(source) => ScenarioError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => ScenarioError::Parse {
                path: path.to_path_buf(),
                line,
                column: 0,
                message,
            },
        }
    }
}
