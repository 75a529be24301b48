//! Experiment orchestration for the lozenge tiling library: configuration,
//! deterministic parallel sampling, statistical reports, exact oracles and
//! SVG rendering.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod oracle;
pub mod parallel;
pub mod render;
pub mod report;

pub use config::{Center, Experiment, ExperimentConfig, Settings};
pub use report::{Check, Quantity, StatReport};
