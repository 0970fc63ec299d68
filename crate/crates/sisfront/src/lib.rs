//! File formats, configuration and the command-line driver around
//! [`sisfront_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod executor;
pub mod output;

pub use config::RunConfig;
pub use error::CliError;
pub use executor::ThreadedExecutor;
