//! Shared domain types and evaluation metrics for foot-mounted IMU gait
//! analysis.
//!
//! This crate holds everything the rest of the workspace agrees on:
//!
//! - raw sensor types ([`ImuSample`], [`ImuTrial`]) and per-stride ground
//!   truth ([`StrideAnnotation`]),
//! - spatio-temporal gait parameters ([`GaitParameters`], [`gait_parameters`]),
//! - the evaluation metrics used by every experiment ([`metrics`]),
//! - per-subject/per-pattern report assembly ([`report`]).
//!
//! All types are immutable value objects after construction and every
//! operation is a pure function, so everything here is safe to use from
//! parallel pipelines without synchronization.

pub mod error;
pub mod math;
pub mod metrics;
pub mod params;
pub mod report;
pub mod types;

pub use error::GaitError;
pub use params::{gait_parameters, GaitParameters};
pub use report::{EvalReport, EvalRow, GroupStats, PredictionRecord};
pub use types::{Foot, GaitType, ImuSample, ImuTrial, StrideAnnotation};

/// Standard gravity used throughout the workspace, m/s².
pub const GRAVITY: f64 = 9.81;
