//! Scenario files, sweeps and result tables for the sojourn laboratory.

pub mod error;
pub mod run;
pub mod scenario;
pub mod table;

pub use error::CliError;
pub use run::{run, worker_count, write_outputs, RunOutput, WORKERS_ENV};
pub use scenario::Scenario;
pub use table::{compare, CompareReport, ResultTable, Tolerances};
