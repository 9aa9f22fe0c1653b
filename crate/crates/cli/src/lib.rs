//! Standard-library companion to `planted-core`: file formats, sweep
//! configuration, the experiment harness, the verification runner and
//! the JSON reports behind the command line tool.

pub mod config;
pub mod harness;
pub mod io;
pub mod reports;
pub mod verify;

pub use config::{ExperimentConfig, GridPoint, ModelKind};
pub use harness::{emit_plotdata, overlap_metrics, run_sweep, PlotKind, ResultRow};
pub use verify::{verify_all, Level, VerifyReport};
