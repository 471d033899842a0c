//! Raw sensor and ground-truth annotation types.

use serde::{Deserialize, Serialize};

use crate::error::GaitError;

/// Walking pattern recorded in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitType {
    Normal,
    /// Parkinson-like pattern: short strides, increased cadence, occasional
    /// larger steps.
    Shuffle,
    /// Asymmetric pattern with one dragging foot.
    Stroke,
}

impl GaitType {
    pub const ALL: [GaitType; 3] = [GaitType::Normal, GaitType::Shuffle, GaitType::Stroke];

    pub fn as_str(&self) -> &'static str {
        match self {
            GaitType::Normal => "normal",
            GaitType::Shuffle => "shuffle",
            GaitType::Stroke => "stroke",
        }
    }
}

impl std::fmt::Display for GaitType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GaitType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(GaitType::Normal),
            "shuffle" | "parkinson" => Ok(GaitType::Shuffle),
            "stroke" => Ok(GaitType::Stroke),
            other => Err(format!("unknown gait type '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Foot {
    Left,
    Right,
}

impl Foot {
    pub const BOTH: [Foot; 2] = [Foot::Left, Foot::Right];

    pub fn as_str(&self) -> &'static str {
        match self {
            Foot::Left => "left",
            Foot::Right => "right",
        }
    }
}

impl std::fmt::Display for Foot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Foot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Foot::Left),
            "right" | "r" => Ok(Foot::Right),
            other => Err(format!("unknown foot '{other}'")),
        }
    }
}

/// One IMU reading: timestamp, body-frame specific force (gravity-inclusive)
/// and body-frame angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    /// Seconds, non-decreasing within a trial.
    pub t: f64,
    /// Accelerometer, m/s².
    pub accel: [f64; 3],
    /// Gyroscope, rad/s.
    pub gyro: [f64; 3],
}

/// A uniformly sampled 6-channel sensor sequence with trial metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImuTrial {
    pub samples: Vec<ImuSample>,
    pub sample_rate_hz: f64,
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub trial_index: u32,
}

/// Tolerance on per-step timestamp spacing, seconds.
pub const UNIFORM_SAMPLING_TOL: f64 = 1e-9;

impl ImuTrial {
    /// Build a trial, checking finiteness and uniform sampling.
    pub fn new(
        samples: Vec<ImuSample>,
        sample_rate_hz: f64,
        subject_id: u32,
        gait_type: GaitType,
        foot: Foot,
        trial_index: u32,
    ) -> Result<Self, GaitError> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(GaitError::InvalidTrial(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        let dt = 1.0 / sample_rate_hz;
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite()
                || s.accel.iter().any(|v| !v.is_finite())
                || s.gyro.iter().any(|v| !v.is_finite())
            {
                return Err(GaitError::InvalidTrial(format!(
                    "non-finite sample at index {i}"
                )));
            }
            if i > 0 {
                let step = s.t - samples[i - 1].t;
                if (step - dt).abs() >= UNIFORM_SAMPLING_TOL {
                    return Err(GaitError::InvalidTrial(format!(
                        "non-uniform sampling at index {i}: step {step}, expected {dt}"
                    )));
                }
            }
        }
        Ok(ImuTrial {
            samples,
            sample_rate_hz,
            subject_id,
            gait_type,
            foot,
            trial_index,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample spacing in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }
}

/// Ground truth for one stride: the event indices and the spatio-temporal
/// parameters they imply.
///
/// A stride runs heel strike → next heel strike of the same foot; stance is
/// `[hs_index, to_index)` and swing `[to_index, next_hs_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrideAnnotation {
    pub foot: Foot,
    pub hs_index: usize,
    pub to_index: usize,
    pub next_hs_index: usize,
    pub stride_length_m: f64,
    pub stance_time_s: f64,
    pub swing_time_s: f64,
    pub stride_time_s: f64,
}

/// Tolerance on stride = stance + swing, seconds.
pub const STRIDE_TIME_TOL: f64 = 1e-9;

impl StrideAnnotation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        foot: Foot,
        hs_index: usize,
        to_index: usize,
        next_hs_index: usize,
        stride_length_m: f64,
        stance_time_s: f64,
        swing_time_s: f64,
        stride_time_s: f64,
    ) -> Result<Self, GaitError> {
        if !(hs_index < to_index && to_index < next_hs_index) {
            return Err(GaitError::InvalidAnnotation(format!(
                "event indices must satisfy hs < to < next_hs, got {hs_index} / {to_index} / {next_hs_index}"
            )));
        }
        if !(stride_length_m.is_finite() && stride_length_m >= 0.0) {
            return Err(GaitError::InvalidAnnotation(format!(
                "stride length must be non-negative, got {stride_length_m}"
            )));
        }
        if (stride_time_s - stance_time_s - swing_time_s).abs() >= STRIDE_TIME_TOL {
            return Err(GaitError::InvalidAnnotation(format!(
                "stride time {stride_time_s} != stance {stance_time_s} + swing {swing_time_s}"
            )));
        }
        Ok(StrideAnnotation {
            foot,
            hs_index,
            to_index,
            next_hs_index,
            stride_length_m,
            stance_time_s,
            swing_time_s,
            stride_time_s,
        })
    }

    /// Build an annotation from event indices alone; times follow from the
    /// sample rate.
    pub fn from_indices(
        foot: Foot,
        hs_index: usize,
        to_index: usize,
        next_hs_index: usize,
        stride_length_m: f64,
        sample_rate_hz: f64,
    ) -> Result<Self, GaitError> {
        let dt = 1.0 / sample_rate_hz;
        let stance = (to_index - hs_index) as f64 * dt;
        let swing = (next_hs_index - to_index) as f64 * dt;
        StrideAnnotation::new(
            foot,
            hs_index,
            to_index,
            next_hs_index,
            stride_length_m,
            stance,
            swing,
            stance + swing,
        )
    }

    /// Stride sample interval `[hs, next_hs)`.
    pub fn interval(&self) -> (usize, usize) {
        (self.hs_index, self.next_hs_index)
    }

    pub fn num_samples(&self) -> usize {
        self.next_hs_index - self.hs_index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64) -> ImuSample {
        ImuSample {
            t,
            accel: [0.0, 0.0, 9.81],
            gyro: [0.0; 3],
        }
    }

    #[test]
    fn trial_rejects_non_uniform_sampling() {
        let samples = vec![sample(0.0), sample(0.005), sample(0.011)];
        let err = ImuTrial::new(samples, 200.0, 1, GaitType::Normal, Foot::Left, 0);
        assert!(matches!(err, Err(GaitError::InvalidTrial(_))));
    }

    #[test]
    fn trial_rejects_non_finite() {
        let mut s = sample(0.0);
        s.accel[1] = f64::NAN;
        let err = ImuTrial::new(vec![s], 200.0, 1, GaitType::Normal, Foot::Left, 0);
        assert!(matches!(err, Err(GaitError::InvalidTrial(_))));
    }

    #[test]
    fn trial_accepts_uniform_sampling() {
        let samples: Vec<_> = (0..100).map(|i| sample(i as f64 / 200.0)).collect();
        assert!(ImuTrial::new(samples, 200.0, 1, GaitType::Normal, Foot::Left, 0).is_ok());
    }

    #[test]
    fn annotation_ordering_enforced() {
        assert!(StrideAnnotation::from_indices(Foot::Left, 10, 10, 30, 1.0, 200.0).is_err());
        assert!(StrideAnnotation::from_indices(Foot::Left, 10, 20, 20, 1.0, 200.0).is_err());
        assert!(StrideAnnotation::from_indices(Foot::Left, 10, 20, 30, -0.5, 200.0).is_err());
    }

    #[test]
    fn annotation_times_are_consistent() {
        let ann = StrideAnnotation::from_indices(Foot::Right, 100, 230, 320, 1.1, 200.0).unwrap();
        assert!((ann.stride_time_s - ann.stance_time_s - ann.swing_time_s).abs() < STRIDE_TIME_TOL);
        assert_eq!(ann.num_samples(), 220);
    }

    #[test]
    fn gait_type_round_trips_through_str() {
        for g in GaitType::ALL {
            assert_eq!(g.as_str().parse::<GaitType>().unwrap(), g);
        }
    }
}
