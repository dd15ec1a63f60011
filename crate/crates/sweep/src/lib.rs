//! Parameter sweeps over the drive strength `E` and frequency `ω` of the
//! driven dissipative qubit, producing phase-diagram data as CSV.

pub mod compare;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod sweep;

pub use compare::{compare_phases, compare_records, PhaseComparison};
pub use config::{Pipeline, Range, SweepConfig};
pub use error::SweepError;
pub use pipeline::{evaluate_point, SweepRecord};
pub use sweep::{compute_sweep, read_csv, run_sweep, write_csv, SweepOutput, SweepSummary};
