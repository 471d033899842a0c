//! Stride window extraction for the regressor.
//!
//! Every stride becomes a fixed 800 x 6 window (time x channels
//! ax,ay,az,gx,gy,gz): stride samples left-aligned at heel strike,
//! right-padded with the stride's last stance sample so the padding looks
//! like a foot at rest instead of an artificial step edge. Strides longer
//! than the window are skipped with a warning.

pub mod cache;
pub mod error;
pub mod norm;
pub mod window;

pub use cache::{read_window_cache, write_window_cache};
pub use error::SegError;
pub use norm::{apply_norm, fit_norm_stats, NormStats};
pub use window::{
    discard_boundary, extract_window, segment_ground_truth, StrideWindow, WindowMeta, CHANNELS,
    WINDOW_LEN,
};
