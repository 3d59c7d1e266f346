//! Scenario runner for refchain pipelines: loads scenario files, steps a
//! simulated plant under a pipeline, logs every cycle to CSV and reports
//! tracking errors.

pub mod error;
pub mod log;
pub mod runner;
pub mod scenario;
pub mod summary;
pub mod trajectory;

pub use error::CliError;
pub use runner::{run_scenario, RunOptions, RunReport, Simulation};
pub use scenario::Scenario;
