//! Fixed-length stride windows and the boundary-discard policy.

use serde::{Deserialize, Serialize};

use gait_core::{Foot, GaitType, ImuTrial, StrideAnnotation};

use crate::error::SegError;

/// Window length in time steps.
pub const WINDOW_LEN: usize = 800;
/// Sensor channels per time step: ax, ay, az, gx, gy, gz.
pub const CHANNELS: usize = 6;

/// Provenance of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindowMeta {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub trial_index: u32,
    pub stride_index: u32,
}

/// One regressor input: `window_len x CHANNELS` tensor (time-major),
/// labeled with the stride length.
#[derive(Debug, Clone, PartialEq)]
pub struct StrideWindow {
    /// Row-major `[t * CHANNELS + c]`, `window_len * CHANNELS` values.
    pub data: Vec<f64>,
    pub label_m: f64,
    /// Number of real (unpadded) time steps at the front.
    pub valid_len: usize,
    pub meta: WindowMeta,
}

impl StrideWindow {
    pub fn window_len(&self) -> usize {
        self.data.len() / CHANNELS
    }

    pub fn channel(&self, t: usize, c: usize) -> f64 {
        self.data[t * CHANNELS + c]
    }
}

/// Extract one window for an annotated stride: samples `[hs, next_hs)`
/// left-aligned, right-padded with the stride's last stance sample
/// (`to_index - 1`, a foot-at-rest reading).
pub fn extract_window(
    trial: &ImuTrial,
    ann: &StrideAnnotation,
    window_len: usize,
    stride_index: u32,
) -> Result<StrideWindow, SegError> {
    let (start, end) = ann.interval();
    if end > trial.len() {
        return Err(SegError::IntervalOutOfBounds {
            start,
            end,
            len: trial.len(),
        });
    }
    let len = end - start;
    if len > window_len {
        return Err(SegError::StrideTooLong {
            len,
            window: window_len,
        });
    }

    let pad_sample = &trial.samples[ann.to_index - 1];
    let pad: [f64; CHANNELS] = [
        pad_sample.accel[0],
        pad_sample.accel[1],
        pad_sample.accel[2],
        pad_sample.gyro[0],
        pad_sample.gyro[1],
        pad_sample.gyro[2],
    ];

    let mut data = Vec::with_capacity(window_len * CHANNELS);
    for s in &trial.samples[start..end] {
        data.extend_from_slice(&[
            s.accel[0], s.accel[1], s.accel[2], s.gyro[0], s.gyro[1], s.gyro[2],
        ]);
    }
    for _ in len..window_len {
        data.extend_from_slice(&pad);
    }

    Ok(StrideWindow {
        data,
        label_m: ann.stride_length_m,
        valid_len: len,
        meta: WindowMeta {
            subject_id: trial.subject_id,
            gait_type: trial.gait_type,
            foot: trial.foot,
            trial_index: trial.trial_index,
            stride_index,
        },
    })
}

/// One window per annotation, labeled with its stride length. Strides that
/// do not fit the window are skipped with a warning.
pub fn segment_ground_truth(trial: &ImuTrial, annotations: &[StrideAnnotation]) -> Vec<StrideWindow> {
    let mut windows = Vec::with_capacity(annotations.len());
    for (i, ann) in annotations.iter().enumerate() {
        match extract_window(trial, ann, WINDOW_LEN, i as u32) {
            Ok(w) => windows.push(w),
            Err(e) => log::warn!(
                "skipping stride {i} of subject {} {} {} trial {}: {e}",
                trial.subject_id,
                trial.gait_type,
                trial.foot,
                trial.trial_index
            ),
        }
    }
    windows
}

/// Discard the first and last stride of every trial. Trials contributing two
/// or fewer strides yield nothing. Surviving windows keep their order.
pub fn discard_boundary(windows: &[StrideWindow]) -> Vec<StrideWindow> {
    let trial_key = |m: &WindowMeta| (m.subject_id, m.gait_type, m.foot, m.trial_index);
    let mut out = Vec::with_capacity(windows.len());
    let mut i = 0;
    while i < windows.len() {
        let key = trial_key(&windows[i].meta);
        let mut j = i;
        while j < windows.len() && trial_key(&windows[j].meta) == key {
            j += 1;
        }
        if j - i > 2 {
            out.extend_from_slice(&windows[i + 1..j - 1]);
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::ImuSample;

    fn trial_with(n: usize) -> ImuTrial {
        let samples = (0..n)
            .map(|i| ImuSample {
                t: i as f64 / 200.0,
                accel: [i as f64, 0.5, 9.81],
                gyro: [0.0, i as f64 * 0.01, 0.0],
            })
            .collect();
        ImuTrial::new(samples, 200.0, 3, GaitType::Normal, Foot::Left, 1).unwrap()
    }

    fn ann(hs: usize, to: usize, next: usize) -> StrideAnnotation {
        StrideAnnotation::from_indices(Foot::Left, hs, to, next, 1.0, 200.0).unwrap()
    }

    #[test]
    fn short_stride_is_left_aligned_and_padded() {
        let trial = trial_with(2000);
        let a = ann(100, 240, 320); // 220 samples
        let w = extract_window(&trial, &a, WINDOW_LEN, 0).unwrap();
        assert_eq!(w.window_len(), WINDOW_LEN);
        assert_eq!(w.valid_len, 220);
        assert_eq!(w.channel(0, 0), 100.0);
        assert_eq!(w.channel(219, 0), 319.0);
        // Pad region is bitwise the last stance sample (index to - 1 = 239).
        for t in 220..WINDOW_LEN {
            assert_eq!(w.channel(t, 0), 239.0);
            assert_eq!(w.channel(t, 2), 9.81);
            assert_eq!(w.channel(t, 4), 239.0 * 0.01);
        }
    }

    #[test]
    fn exact_length_stride_has_zero_padding() {
        let trial = trial_with(2000);
        let a = ann(100, 500, 900); // exactly 800
        let w = extract_window(&trial, &a, WINDOW_LEN, 0).unwrap();
        assert_eq!(w.valid_len, 800);
        assert_eq!(w.channel(799, 0), 899.0);
    }

    #[test]
    fn overlong_stride_is_rejected_and_skipped() {
        let trial = trial_with(2000);
        let a = ann(100, 600, 901); // 801 samples
        assert!(matches!(
            extract_window(&trial, &a, WINDOW_LEN, 0),
            Err(SegError::StrideTooLong { len: 801, .. })
        ));
        let windows = segment_ground_truth(&trial, &[ann(0, 100, 220), a, ann(901, 1000, 1100)]);
        assert_eq!(windows.len(), 2);
    }

    #[test]
    fn labels_round_trip_through_windows() {
        let trial = trial_with(4000);
        let anns: Vec<StrideAnnotation> = (0..10)
            .map(|k| {
                let hs = 100 + k * 300;
                StrideAnnotation::from_indices(Foot::Left, hs, hs + 180, hs + 300, 0.5 + k as f64 * 0.01, 200.0)
                    .unwrap()
            })
            .collect();
        let windows = segment_ground_truth(&trial, &anns);
        assert_eq!(windows.len(), 10);
        for (w, a) in windows.iter().zip(&anns) {
            assert_eq!(w.label_m, a.stride_length_m);
        }
    }

    fn meta_window(subject: u32, trial: u32, stride: u32) -> StrideWindow {
        StrideWindow {
            data: vec![0.0; WINDOW_LEN * CHANNELS],
            label_m: stride as f64,
            valid_len: 10,
            meta: WindowMeta {
                subject_id: subject,
                gait_type: GaitType::Normal,
                foot: Foot::Left,
                trial_index: trial,
                stride_index: stride,
            },
        }
    }

    #[test]
    fn discard_boundary_trims_each_trial() {
        let mut windows = Vec::new();
        for s in 0..6 {
            windows.push(meta_window(1, 0, s));
        }
        for s in 0..2 {
            windows.push(meta_window(1, 1, s));
        }
        for s in 0..3 {
            windows.push(meta_window(2, 0, s));
        }
        let kept = discard_boundary(&windows);
        // 6 -> 4, 2 -> 0, 3 -> 1
        assert_eq!(kept.len(), 5);
        let counts: Vec<u32> = kept.iter().map(|w| w.meta.stride_index).collect();
        assert_eq!(counts, vec![1, 2, 3, 4, 1]);
    }

    #[test]
    fn discard_boundary_count_formula() {
        let mut windows = Vec::new();
        let per_trial = [6usize, 2, 3, 9, 1, 4];
        for (t, &n) in per_trial.iter().enumerate() {
            for s in 0..n {
                windows.push(meta_window(1, t as u32, s as u32));
            }
        }
        let kept = discard_boundary(&windows);
        let expected: usize = per_trial.iter().map(|&n| n.saturating_sub(2)).sum();
        assert_eq!(kept.len(), expected);
    }
}
