//! Command-line harness for sonarknot: experiment configs, signature files,
//! run manifests and the subcommands of the `sonar-knot` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod exit;
pub mod io;
pub mod manifest;
pub mod schema;
