//! Channel-wise normalization fitted on the training split only.

use serde::{Deserialize, Serialize};

use crate::error::SegError;
use crate::window::{StrideWindow, CHANNELS};

/// Floor applied to per-channel STD so constant channels stay finite.
pub const STD_FLOOR: f64 = 1e-6;

/// Per-channel mean and standard deviation, fitted over unpadded samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: [f64; CHANNELS],
    pub std: [f64; CHANNELS],
}

impl NormStats {
    /// No-op stats.
    pub fn identity() -> Self {
        NormStats {
            mean: [0.0; CHANNELS],
            std: [1.0; CHANNELS],
        }
    }
}

/// Fit stats over the unpadded samples of the training windows.
pub fn fit_norm_stats(windows: &[StrideWindow]) -> Result<NormStats, SegError> {
    if windows.is_empty() {
        return Err(SegError::EmptyTrainingSet);
    }
    let mut sum = [0.0f64; CHANNELS];
    let mut count = 0usize;
    for w in windows {
        for t in 0..w.valid_len {
            for c in 0..CHANNELS {
                sum[c] += w.channel(t, c);
            }
        }
        count += w.valid_len;
    }
    let mut mean = [0.0f64; CHANNELS];
    for c in 0..CHANNELS {
        mean[c] = sum[c] / count as f64;
    }
    let mut sq = [0.0f64; CHANNELS];
    for w in windows {
        for t in 0..w.valid_len {
            for c in 0..CHANNELS {
                let d = w.channel(t, c) - mean[c];
                sq[c] += d * d;
            }
        }
    }
    let mut std = [0.0f64; CHANNELS];
    for c in 0..CHANNELS {
        std[c] = (sq[c] / count as f64).sqrt().max(STD_FLOOR);
    }
    Ok(NormStats { mean, std })
}

/// Apply `(x - mean) / std` channel-wise to the whole window (padding
/// included, so the pad stays a constant at-rest vector).
pub fn apply_norm(window: &StrideWindow, stats: &NormStats) -> StrideWindow {
    let mut out = window.clone();
    for t in 0..window.window_len() {
        for c in 0..CHANNELS {
            out.data[t * CHANNELS + c] = (window.channel(t, c) - stats.mean[c]) / stats.std[c];
        }
    }
    out
}
