//! Configuration parsing and run orchestration behind the `lightstore`
//! binary.

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, parse_config_str, Formats, Mode, RunConfig};
pub use error::{exit, CliError};
pub use run::run;
