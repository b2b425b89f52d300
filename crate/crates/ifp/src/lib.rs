//! File formats, configuration and subcommand drivers for the `ifp` command
//! line tool. The numerics live in [`ifp_core`].

pub mod commands;
pub mod config;
pub mod csvio;
pub mod documents;
pub mod error;

pub use commands::{execute, Command};
pub use config::ExperimentConfig;
pub use error::{exit, CliError, Result};

/// Initializes logging from `IFP_LOG` (`error`, `info` or `debug`; default
/// `error`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("IFP_LOG", "error");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}
