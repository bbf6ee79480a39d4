//! Experiment runner for `nlsx`: spec files, initial data, presets and reports.

pub mod cache;
pub mod config;
pub mod datum;
pub mod output;
pub mod presets;
pub mod runner;
pub mod spec;
pub mod sweep;

pub use runner::{run, run_selected, Claim, ExperimentReport, Selection};
pub use spec::{Analysis, ExperimentSpec};
