//! Configuration and report generation behind the `dampwave` binary.

pub mod commands;
pub mod config;
