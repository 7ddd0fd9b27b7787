//! Library surface of the experiment runner, kept separate from the
//! binary so integration tests can drive commands in-process.

pub mod commands;
pub mod config;
pub mod report;
