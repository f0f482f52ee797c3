//! Command-line driver for `rmcount`: estimates, oracles, weight
//! enumerators, budgets, lower bounds and reference-table reruns, emitted as
//! JSON records or CSV.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod record;

pub use commands::{run, summarize};
pub use config::{CommandKind, Flags, OutputFormat, RunConfig, WeightsMode};
pub use error::{CliError, CliResult};
pub use record::{Payload, RunRecord};
