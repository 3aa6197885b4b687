//! Command-line front end for `monadic-sdp`: problem files and subcommands.

pub mod commands;
pub mod problem;
