//! Configuration, per-coupling pipeline, sweep driver and self-checks behind
//! the `tripartite` command-line tool.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod sweep;
pub mod verify;
