//! Library side of the `ecgspike` command-line tool, exposed so the
//! integration and acceptance tests can drive each subcommand in-process.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod output;
