//! IO, file formats and subcommand drivers on top of `resonance-core`.

pub mod config;
pub mod maass;
pub mod runner;
