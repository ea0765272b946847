//! Command-line front end: scenario config parsing and the `bound`,
//! `verify`, `sweep` and `norms` commands, all producing CSV.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, Scenario};
pub use run::{run, Command, RunOptions, RunOutput};
