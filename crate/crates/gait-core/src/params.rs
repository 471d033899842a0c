//! Spatio-temporal gait parameters derived from per-stride annotations of
//! both feet.

use serde::{Deserialize, Serialize};

use crate::error::GaitError;
use crate::metrics::mean_std;
use crate::types::StrideAnnotation;

/// Summary gait parameters for one recording (both feet).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitParameters {
    pub cadence_steps_per_min: f64,
    pub mean_stride_length_m: f64,
    pub stride_length_std_m: f64,
    pub mean_stance_time_s: f64,
    pub mean_swing_time_s: f64,
    /// Mean swing time over mean stance time.
    pub swing_stance_ratio: f64,
    /// Mean per-cycle interval with both feet in stance; `None` when the two
    /// feet's annotations do not cover overlapping time spans.
    pub double_support_time_s: Option<f64>,
    /// Magnitude-normalized left/right difference of the per-foot
    /// swing-to-stance ratio: `|L - R| / (0.5 (L + R))`.
    pub symmetry_index: f64,
}

fn foot_swing_stance_ratio(annotations: &[StrideAnnotation]) -> (f64, f64, f64) {
    let (stance, _) = mean_std(
        &annotations
            .iter()
            .map(|a| a.stance_time_s)
            .collect::<Vec<_>>(),
    )
    .expect("nonempty");
    let (swing, _) = mean_std(
        &annotations
            .iter()
            .map(|a| a.swing_time_s)
            .collect::<Vec<_>>(),
    )
    .expect("nonempty");
    (swing / stance, stance, swing)
}

/// Total overlap between the stance intervals of the two feet, in samples.
fn stance_overlap_samples(left: &[StrideAnnotation], right: &[StrideAnnotation]) -> usize {
    let mut total = 0usize;
    for l in left {
        for r in right {
            let lo = l.hs_index.max(r.hs_index);
            let hi = l.to_index.min(r.to_index);
            total += hi.saturating_sub(lo);
        }
    }
    total
}

/// Compute [`GaitParameters`] from sorted per-foot annotations.
///
/// Cadence counts one step per heel strike of either foot over the elapsed
/// span. Everything works on index differences, so the result is invariant
/// to a uniform time shift of all annotations.
pub fn gait_parameters(
    left: &[StrideAnnotation],
    right: &[StrideAnnotation],
    sample_rate_hz: f64,
) -> Result<GaitParameters, GaitError> {
    if left.is_empty() || right.is_empty() {
        return Err(GaitError::EmptyInput("annotations for one or both feet"));
    }
    let dt = 1.0 / sample_rate_hz;
    let all: Vec<&StrideAnnotation> = left.iter().chain(right.iter()).collect();

    let first_hs = all.iter().map(|a| a.hs_index).min().unwrap();
    let last_hs = all.iter().map(|a| a.next_hs_index).max().unwrap();
    let elapsed_s = (last_hs - first_hs) as f64 * dt;
    let steps = (left.len() + right.len()) as f64;
    let cadence = 60.0 * steps / elapsed_s;

    let lengths: Vec<f64> = all.iter().map(|a| a.stride_length_m).collect();
    let (mean_len, std_len) = mean_std(&lengths)?;

    let stances: Vec<f64> = all.iter().map(|a| a.stance_time_s).collect();
    let swings: Vec<f64> = all.iter().map(|a| a.swing_time_s).collect();
    let (mean_stance, _) = mean_std(&stances)?;
    let (mean_swing, _) = mean_std(&swings)?;

    let (ratio_l, _, _) = foot_swing_stance_ratio(left);
    let (ratio_r, _, _) = foot_swing_stance_ratio(right);
    let symmetry_index = (ratio_l - ratio_r).abs() / (0.5 * (ratio_l + ratio_r));

    let l_span = (
        left.iter().map(|a| a.hs_index).min().unwrap(),
        left.iter().map(|a| a.next_hs_index).max().unwrap(),
    );
    let r_span = (
        right.iter().map(|a| a.hs_index).min().unwrap(),
        right.iter().map(|a| a.next_hs_index).max().unwrap(),
    );
    let spans_overlap = l_span.0 < r_span.1 && r_span.0 < l_span.1;
    let double_support = if spans_overlap {
        let cycles = left.len().min(right.len());
        Some(stance_overlap_samples(left, right) as f64 * dt / cycles as f64)
    } else {
        None
    };

    Ok(GaitParameters {
        cadence_steps_per_min: cadence,
        mean_stride_length_m: mean_len,
        stride_length_std_m: std_len,
        mean_stance_time_s: mean_stance,
        mean_swing_time_s: mean_swing,
        swing_stance_ratio: mean_swing / mean_stance,
        double_support_time_s: double_support,
        symmetry_index,
    })
}
