//! Experiment orchestration: single runs, sweeps, CSV output and snapshots.

pub mod config;
pub mod csv;
pub mod run;
pub mod snapshot;
pub mod stats;
pub mod sweep;

use thiserror::Error;

use crate::network::{InvariantViolation, NetworkError};
use crate::params::ParamsError;

pub use config::{Config, ConfigError};
pub use run::{run_single, RunOutput};
pub use snapshot::{export_snapshot, import_snapshot, SnapshotError};
pub use stats::{aggregate, SummaryRow};
pub use sweep::{run_sweep, SweepResult, SweepSpec};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
    #[error("network fault: {0}")]
    Network(#[from] NetworkError),
}
