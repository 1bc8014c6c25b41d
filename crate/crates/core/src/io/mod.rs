//! File formats and command plumbing: sample files, bundled fixtures, trace
//! CSV, run configuration and SVG plots.

pub mod config;
pub mod fixtures;
pub mod plot;
pub mod samples;
pub mod trace;

pub use samples::{parse_samples, read_samples};
