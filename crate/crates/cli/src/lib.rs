//! Command-line front end for the hull-charging mission model: scenario
//! files, subcommands, and the CSV/JSON artifacts they write.

pub mod cmd;
pub mod config_file;
pub mod report;

pub use cmd::{run, Cli};
pub use config_file::{parse_config, parse_config_str, ConfigError};
pub use report::{emit_outputs, RunManifest};
