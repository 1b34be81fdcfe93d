//! JSON formats, tower replay, the acceptance corpus and the command-line
//! driver on top of `valuform-core`.

pub mod commands;
pub mod corpus;
pub mod docs;
pub mod error;

pub use commands::{run, JobSpec, Options, Outcome};
pub use error::CliError;
