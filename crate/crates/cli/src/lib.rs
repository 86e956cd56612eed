//! Configuration, dispatch and reporting for the `translie` command.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use report::{Entry, RunReport, Verdict};
pub use run::{run, RunError};
