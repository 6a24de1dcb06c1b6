//! Library half of the `euler-zeros` command: configuration, the root
//! cache, SVG output and one function per subcommand.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;
