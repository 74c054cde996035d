//! Scenario execution for the `becreg` command-line tool.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;
pub mod pipeline;
