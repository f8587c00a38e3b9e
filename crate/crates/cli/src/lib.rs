//! Command-line front end: coupling sweeps, Wigner grid export, state dumps
//! and the verification suite, all writing CSV or key-value text.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

pub use cli::{init_threads, run, Cli, Command, Opts};
pub use commands::{build_state, cmd_spectrum, cmd_state, cmd_verify, cmd_wigner, Outcome};
pub use config::{RunConfig, StateKind};
