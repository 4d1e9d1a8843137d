//! Command-line front end for synthesising strategies of Petri games.
//!
//! The library half holds the commands ([`commands`]), their configuration
//! and the DOT/JSON renderers; the `petrisynth` binary parses arguments and
//! writes artifacts.
//!
//! Exit codes: 0 winning or valid, 10 losing or invalid, 2 input outside the
//! supported class (or malformed), 3 a configured cap was exceeded, 1
//! internal errors.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;

pub use commands::{Artifact, Outcome};
pub use config::{Emit, RunConfig};
pub use error::{exit, CliError};
