//! Classical ZUPT dead-reckoning baseline.
//!
//! Pipeline: SHOE-style stance detection → complementary-filter orientation
//! tracking → gravity subtraction and trapezoidal double integration with
//! zero-velocity resets and per-swing linear de-drift → stance-to-stance
//! stride segmentation and horizontal stride lengths.
//!
//! All functions are pure over immutable trials; per-trial parallelism is
//! safe.

pub mod config;
pub mod detector;
pub mod error;
pub mod orientation;
pub mod reckon;
pub mod segment;

pub use config::ZuptConfig;
pub use detector::detect_stationary;
pub use error::ZuptError;
pub use orientation::estimate_orientation;
pub use reckon::{dead_reckon, dump_debug_csv, NavSolution};
pub use segment::{zupt_segment, zupt_stride_lengths};

use gait_core::ImuTrial;

/// Run the whole baseline on one trial: detect, orient, reckon, segment.
///
/// Returns the navigation solution and the detected stride intervals.
pub fn run_pipeline(
    trial: &ImuTrial,
    cfg: &ZuptConfig,
) -> Result<(NavSolution, Vec<(usize, usize)>), ZuptError> {
    let mask = detect_stationary(trial, cfg)?;
    let quats = estimate_orientation(trial, &mask)?;
    let nav = dead_reckon(trial, &quats, &mask)?;
    let intervals = zupt_segment(&nav.stationary_mask);
    Ok((nav, intervals))
}
