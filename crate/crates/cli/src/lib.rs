//! Configuration, verification suite and experiment drivers behind the `weinstein` binary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod convergence;
pub mod output;
