//! Synthetic gait data: parametric ground-truth generator, IMU sensor-error
//! model, and label-preserving augmentation.
//!
//! The generator builds a kinematic foot model per trial — zero velocity in
//! stance, a minimum-jerk forward swing, trig-polynomial vertical clearance
//! and swing pitch — then rotates the world-frame specific force into the
//! body frame to produce accelerometer/gyroscope channels. Swing profiles are
//! constructed so that discrete trapezoidal integration of the sampled
//! world-frame acceleration reproduces every stride-length label to floating
//! point precision, which is what makes the downstream dead-reckoning
//! baseline testable against exact ground truth.
//!
//! Everything is deterministic given (profile, seed); per-trial seeds are
//! derived by stable hashing of the manifest coordinates so parallel
//! generation cannot change results.

pub mod augment;
pub mod dataset;
pub mod error;
pub mod generator;
pub mod io;
pub mod profile;
pub mod seed;
pub mod sensor;

pub use augment::{augment, augment_batch, augment_with, AugmentConfig, Yaw};
pub use dataset::{generate_dataset, generate_dataset_with, Dataset, DatasetParams, Manifest, ManifestEntry, TrialRecord};
pub use error::SynthError;
pub use generator::{generate_trial, generate_trial_detailed, IdealKinematics, TrialParams};
pub use profile::{sample_profile, sample_profile_for, Cohort, GaitProfile};
pub use sensor::{apply_sensor_model, SensorNoiseConfig};
