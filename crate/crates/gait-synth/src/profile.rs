//! Per-subject gait profiles and their cohort calibration.
//!
//! Cohort-level stride statistics are calibrated so that generated data
//! lands near the reference targets: normal 1.11 ± 0.144 m, shuffle
//! 0.433 ± 0.207 m, stroke 0.599 ± 0.116 m, with shuffle at a visibly
//! higher cadence and the highest stride-to-stride variance. The `Elderly`
//! cohort is a domain-shifted population (short, slow, high-variance
//! strides around 0.80 m) used for the transfer-learning experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use gait_core::{Foot, GaitType};

use crate::error::SynthError;
use crate::seed::mix;

/// Parameter bundle describing how one subject walks one pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitProfile {
    pub gait_type: GaitType,
    pub mean_stride_length_m: f64,
    pub stride_length_std_m: f64,
    pub mean_stride_time_s: f64,
    /// Fraction of the stride spent in stance, in (0.45, 0.85).
    pub stance_fraction: f64,
    /// Peak swing-foot lift, meters.
    pub clearance_m: f64,
    pub cadence_steps_per_min: f64,
    /// Peak swing pitch excursion, degrees (scaled per stride with length).
    pub swing_pitch_peak_deg: f64,
    /// Stroke only: which foot drags. Ignored for other gaits.
    pub drag_foot: Foot,
    /// Stroke only: stride-length multiplier for the dragging foot, (0, 1].
    pub drag_length_factor: f64,
    /// Stroke only: clearance/pitch multiplier for the dragging foot, (0, 1].
    pub drag_clearance_factor: f64,
    /// Shuffle only: probability of an occasional larger stride, [0, 1).
    pub p_big: f64,
    /// Shuffle only: length multiplier of those larger strides, > 1.
    pub big_stride_factor: f64,
}

impl GaitProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        let positive = [
            ("mean_stride_time_s", self.mean_stride_time_s),
            ("cadence_steps_per_min", self.cadence_steps_per_min),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SynthError::InvalidProfile(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        // A zero mean stride length is the degenerate stationary profile.
        if !(self.mean_stride_length_m.is_finite() && self.mean_stride_length_m >= 0.0) {
            return Err(SynthError::InvalidProfile(format!(
                "mean_stride_length_m must be non-negative, got {}",
                self.mean_stride_length_m
            )));
        }
        if !(self.stride_length_std_m >= 0.0 && self.clearance_m >= 0.0) {
            return Err(SynthError::InvalidProfile(
                "stride_length_std_m and clearance_m must be non-negative".into(),
            ));
        }
        if !(self.stance_fraction > 0.45 && self.stance_fraction < 0.85) {
            return Err(SynthError::InvalidProfile(format!(
                "stance_fraction must lie in (0.45, 0.85), got {}",
                self.stance_fraction
            )));
        }
        if !(self.drag_length_factor > 0.0 && self.drag_length_factor <= 1.0)
            || !(self.drag_clearance_factor > 0.0 && self.drag_clearance_factor <= 1.0)
        {
            return Err(SynthError::InvalidProfile(
                "drag factors must lie in (0, 1]".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.p_big) || self.big_stride_factor < 1.0 {
            return Err(SynthError::InvalidProfile(
                "p_big must lie in [0, 1) and big_stride_factor must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Stride-length multiplier for a given foot (asymmetric for stroke).
    ///
    /// The non-dragging foot compensates so the across-feet mean stays at
    /// `mean_stride_length_m`.
    pub fn length_factor(&self, foot: Foot) -> f64 {
        if self.gait_type == GaitType::Stroke {
            if foot == self.drag_foot {
                self.drag_length_factor
            } else {
                2.0 - self.drag_length_factor
            }
        } else {
            1.0
        }
    }

    /// Clearance/pitch multiplier for a given foot.
    pub fn clearance_factor(&self, foot: Foot) -> f64 {
        if self.gait_type == GaitType::Stroke && foot == self.drag_foot {
            self.drag_clearance_factor
        } else {
            1.0
        }
    }

    /// Stance fraction for a given foot; the dragging foot has a delayed
    /// toe-off.
    pub fn stance_fraction_for(&self, foot: Foot) -> f64 {
        if self.gait_type == GaitType::Stroke && foot == self.drag_foot {
            (self.stance_fraction + 0.05).min(0.84)
        } else {
            self.stance_fraction
        }
    }
}

/// Which population a profile is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohort {
    /// The base cohort the reference statistics describe.
    Base,
    /// Domain-shifted elderly population for transfer-learning experiments.
    Elderly,
}

fn gait_tag(gait: GaitType) -> u64 {
    match gait {
        GaitType::Normal => 1,
        GaitType::Shuffle => 2,
        GaitType::Stroke => 3,
    }
}

/// Draw a per-subject profile for the base cohort. Deterministic per seed.
pub fn sample_profile(gait_type: GaitType, subject_seed: u64) -> GaitProfile {
    sample_profile_for(Cohort::Base, gait_type, subject_seed)
}

/// Draw a per-subject profile for a given cohort. Deterministic per seed.
pub fn sample_profile_for(cohort: Cohort, gait_type: GaitType, subject_seed: u64) -> GaitProfile {
    let cohort_tag = match cohort {
        Cohort::Base => 0x0Bu64,
        Cohort::Elderly => 0xE1u64,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(mix(subject_seed, &[cohort_tag, gait_tag(gait_type)]));
    let norm = |mean: f64, std: f64, rng: &mut ChaCha8Rng| -> f64 {
        Normal::new(mean, std).unwrap().sample(rng)
    };
    let unif = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| -> f64 {
        Uniform::new(lo, hi).unwrap().sample(rng)
    };

    let mut profile = match (cohort, gait_type) {
        (Cohort::Base, GaitType::Normal) => GaitProfile {
            gait_type,
            mean_stride_length_m: norm(1.11, 0.085, &mut rng).clamp(0.85, 1.40),
            stride_length_std_m: norm(0.105, 0.030, &mut rng).clamp(0.04, 0.22),
            mean_stride_time_s: norm(1.05, 0.04, &mut rng).clamp(0.90, 1.25),
            stance_fraction: norm(0.62, 0.015, &mut rng).clamp(0.55, 0.70),
            clearance_m: norm(0.05, 0.005, &mut rng).clamp(0.03, 0.08),
            cadence_steps_per_min: 0.0,
            swing_pitch_peak_deg: norm(25.0, 2.0, &mut rng).clamp(18.0, 32.0),
            drag_foot: Foot::Left,
            drag_length_factor: 1.0,
            drag_clearance_factor: 1.0,
            p_big: 0.0,
            big_stride_factor: 1.0,
        },
        (Cohort::Base, GaitType::Shuffle) => GaitProfile {
            gait_type,
            mean_stride_length_m: norm(0.433, 0.055, &mut rng).clamp(0.25, 0.62),
            stride_length_std_m: norm(0.115, 0.020, &mut rng).clamp(0.06, 0.18),
            // Increased cadence: clearly shorter stride time than normal.
            mean_stride_time_s: norm(0.72, 0.03, &mut rng).clamp(0.60, 0.84),
            stance_fraction: norm(0.60, 0.015, &mut rng).clamp(0.55, 0.68),
            clearance_m: norm(0.018, 0.003, &mut rng).clamp(0.008, 0.03),
            cadence_steps_per_min: 0.0,
            swing_pitch_peak_deg: norm(10.0, 1.5, &mut rng).clamp(6.0, 15.0),
            drag_foot: Foot::Left,
            drag_length_factor: 1.0,
            drag_clearance_factor: 1.0,
            p_big: unif(0.10, 0.20, &mut rng),
            big_stride_factor: unif(1.9, 2.5, &mut rng),
        },
        (Cohort::Base, GaitType::Stroke) => GaitProfile {
            gait_type,
            mean_stride_length_m: norm(0.599, 0.075, &mut rng).clamp(0.40, 0.82),
            stride_length_std_m: norm(0.055, 0.012, &mut rng).clamp(0.03, 0.10),
            mean_stride_time_s: norm(1.15, 0.05, &mut rng).clamp(0.95, 1.35),
            stance_fraction: norm(0.65, 0.015, &mut rng).clamp(0.58, 0.72),
            clearance_m: norm(0.045, 0.005, &mut rng).clamp(0.025, 0.065),
            cadence_steps_per_min: 0.0,
            swing_pitch_peak_deg: norm(22.0, 2.0, &mut rng).clamp(15.0, 28.0),
            drag_foot: Foot::Left,
            drag_length_factor: unif(0.80, 0.88, &mut rng),
            drag_clearance_factor: unif(0.30, 0.45, &mut rng),
            p_big: 0.0,
            big_stride_factor: 1.0,
        },
        // Elderly cohort: short slow strides with high variability across
        // all patterns; pathological multipliers stay as in the base cohort.
        (Cohort::Elderly, _) => {
            let mut p = sample_profile_for(Cohort::Base, gait_type, mix(subject_seed, &[0x5E]));
            p.mean_stride_length_m = match gait_type {
                GaitType::Normal => norm(0.80, 0.08, &mut rng).clamp(0.55, 1.05),
                GaitType::Shuffle => norm(0.33, 0.05, &mut rng).clamp(0.18, 0.50),
                GaitType::Stroke => norm(0.45, 0.06, &mut rng).clamp(0.30, 0.65),
            };
            p.stride_length_std_m = norm(0.16, 0.03, &mut rng).clamp(0.08, 0.26);
            p.mean_stride_time_s = (p.mean_stride_time_s * 1.25).min(1.60);
            p.clearance_m *= 0.7;
            p.swing_pitch_peak_deg *= 0.8;
            p
        }
    };
    // One stride spans two steps, so steps/min = 2 * 60 / stride time.
    profile.cadence_steps_per_min = 120.0 / profile.mean_stride_time_s;
    profile
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_identical_profile() {
        let a = sample_profile(GaitType::Shuffle, 1234);
        let b = sample_profile(GaitType::Shuffle, 1234);
        assert_eq!(a, b);
    }

    #[test]
    fn normal_cohort_mean_stride_near_target() {
        let n = 1000;
        let mean: f64 = (0..n)
            .map(|s| sample_profile(GaitType::Normal, s).mean_stride_length_m)
            .sum::<f64>()
            / n as f64;
        assert!(
            (mean - 1.11).abs() < 0.05,
            "normal cohort mean {mean} not within 1.11 +/- 0.05"
        );
    }

    #[test]
    fn shuffle_and_stroke_cohort_means_near_targets() {
        let n = 1000;
        let mean_of = |gait: GaitType| -> f64 {
            (0..n)
                .map(|s| sample_profile(gait, s).mean_stride_length_m)
                .sum::<f64>()
                / n as f64
        };
        let shuffle = mean_of(GaitType::Shuffle);
        let stroke = mean_of(GaitType::Stroke);
        assert!((shuffle - 0.433).abs() < 0.05, "shuffle cohort mean {shuffle}");
        assert!((stroke - 0.599).abs() < 0.05, "stroke cohort mean {stroke}");
    }

    #[test]
    fn shuffle_has_increased_cadence() {
        for seed in 0..100 {
            let normal = sample_profile(GaitType::Normal, seed);
            let shuffle = sample_profile(GaitType::Shuffle, seed);
            assert!(
                shuffle.mean_stride_time_s < normal.mean_stride_time_s,
                "seed {seed}: shuffle stride time {} !< normal {}",
                shuffle.mean_stride_time_s,
                normal.mean_stride_time_s
            );
            assert!(shuffle.cadence_steps_per_min > normal.cadence_steps_per_min);
        }
    }

    #[test]
    fn profiles_validate() {
        for gait in GaitType::ALL {
            for seed in 0..50 {
                sample_profile(gait, seed).validate().unwrap();
                sample_profile_for(Cohort::Elderly, gait, seed)
                    .validate()
                    .unwrap();
            }
        }
    }

    #[test]
    fn elderly_cohort_is_shifted_down() {
        let n = 400;
        let mean = |cohort: Cohort| -> f64 {
            (0..n)
                .map(|s| sample_profile_for(cohort, GaitType::Normal, s).mean_stride_length_m)
                .sum::<f64>()
                / n as f64
        };
        assert!(mean(Cohort::Elderly) < mean(Cohort::Base) - 0.2);
    }
}
