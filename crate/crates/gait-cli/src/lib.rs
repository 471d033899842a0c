//! Library surface of the gait toolkit CLI: configuration, the estimator
//! registry, experiment orchestration and report emission. The acceptance
//! suite drives experiments through this crate exactly as the binary does.

pub mod config;
pub mod estimator;
pub mod experiments;
pub mod reports;

pub use config::ExperimentConfig;
