//! Causal confirmation measures for binary causes and outcomes, with
//! do-adjustment of stratified data and Simpson's paradox detection.

pub mod adjust;
pub mod builtin;
pub mod ingest;
pub mod measures;
pub mod report;
pub mod semantic;
pub mod tables;
pub mod chart;
pub mod verify;
pub mod cli;
