//! Scanning conductors, aggregating ranks, and the verification drivers
//! behind the command line.

mod checkpoint;
mod crosscheck;
mod report;
mod scan;
mod verify;

use std::path::PathBuf;

use thiserror::Error;

use crate::norms::NormError;

pub use checkpoint::{Checkpoint, ShardState};
pub use crosscheck::{crosscheck, CrosscheckReport, Mismatch, ReferenceRow};
pub use report::{Deltas, MomentReport, Partial};
pub use scan::{field_records, scan, scan_with, shard_ranges, write_per_field_csv, ScanControl, ScanOutcome, ScanStatus};
pub use verify::{verify, CaseResult, VerifyKind, VerifySummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("checkpoint {path} was written for a different configuration")]
    CheckpointMismatch { path: PathBuf },
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("conductor {conductor}: field_index {field_index} appears more than once")]
    AmbiguousMatch { conductor: u64, field_index: u64 },
    #[error(transparent)]
    Norm(#[from] NormError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub max_conductor: u64,
    pub k_max: u32,
    pub shard_count: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub emit_per_field: bool,
}

impl ScanConfig {
    pub fn new(max_conductor: u64) -> Self {
        Self {
            max_conductor,
            k_max: 3,
            shard_count: 1,
            checkpoint_path: None,
            output_path: None,
            emit_per_field: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.max_conductor < 7 {
            return Err(HarnessError::InvalidConfig(format!("max_conductor {} < 7", self.max_conductor)));
        }
        if self.k_max < 1 {
            return Err(HarnessError::InvalidConfig("k_max must be at least 1".into()));
        }
        if self.shard_count < 1 {
            return Err(HarnessError::InvalidConfig("shard_count must be at least 1".into()));
        }
        if self.emit_per_field && self.output_path.is_none() {
            return Err(HarnessError::InvalidConfig("per-field output needs an output path".into()));
        }
        Ok(())
    }

    /// `report.json` → `report.fields.csv`.
    pub fn per_field_path(&self) -> Option<PathBuf> {
        self.output_path.as_ref().map(|p| p.with_extension("fields.csv"))
    }
}
