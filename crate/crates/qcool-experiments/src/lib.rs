//! Experiment drivers behind the `qcool` command-line tool.
//!
//! Each `run_*` function takes a [`config::RunConfig`], returns an in-memory
//! report carrying the resolved config, and can write its CSV/JSON outputs.

pub mod budget_table;
pub mod config;
pub mod error;
pub mod instance;
pub mod observable;
pub mod output;
pub mod scaling;
pub mod spectrum;
pub mod times;
pub mod validate;

pub use budget_table::run_budget;
pub use config::RunConfig;
pub use error::ExperimentError;
pub use observable::run_observable;
pub use scaling::run_cooling_scaling;
pub use spectrum::run_spectrum;
pub use validate::run_validate;
