//! Experiment protocol: metrics, splits, sparsification, cold-start
//! filtering, comparative runs and their reports.

pub mod experiment;
pub mod metrics;
pub mod report;
pub mod sparsify;
pub mod split;
pub mod sweep;
pub mod synthetic;

pub use experiment::{
    run_experiment, EvaluationReport, ExperimentConfig, ExperimentOutcome, Method, MethodFailure, Population,
    ScoringMode, DEFAULT_COLD_START_THRESHOLD,
};
pub use metrics::{mae, rmse};
pub use report::{write_reports_csv, Manifest};
pub use sparsify::{keep_probability, sparsify, Sparsified};
pub use split::{cold_start_users, split_half, SplitPair};
pub use sweep::{anti_sparsification, stability_runs, validity_sweep, StabilitySummary, SweepPoint, VALIDITY_DEGREES};
