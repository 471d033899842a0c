//! Label-preserving augmentation.
//!
//! Allowed transforms are the ones that cannot change a stride length:
//! re-drawn additive white noise, constant bias injection, and a rotation of
//! the sensor frame about the gravity axis (horizontal displacement
//! magnitude, and hence every stride label, is invariant to yaw). The
//! annotations are copied through untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use gait_core::math::Quat;
use gait_core::{ImuTrial, StrideAnnotation};

use crate::seed::mix;

/// How the yaw angle is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Yaw {
    /// Rotate by exactly this angle, radians.
    Fixed(f64),
    /// Draw uniformly from ±max_abs radians.
    Uniform { max_abs: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub yaw: Yaw,
    /// Re-drawn white noise STD, m/s² (0 disables).
    pub accel_noise_std: f64,
    /// Re-drawn white noise STD, rad/s (0 disables).
    pub gyro_noise_std: f64,
    /// Injected constant bias range (uniform ±), m/s².
    pub accel_bias: f64,
    /// Injected constant bias range (uniform ±), rad/s.
    pub gyro_bias: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            yaw: Yaw::Uniform {
                max_abs: std::f64::consts::PI,
            },
            accel_noise_std: 0.03,
            gyro_noise_std: 0.008,
            accel_bias: 0.05,
            gyro_bias: 0.008,
        }
    }
}

impl AugmentConfig {
    /// Rotation-only augmentation with a fixed yaw.
    pub fn rotation_only(yaw_rad: f64) -> Self {
        AugmentConfig {
            yaw: Yaw::Fixed(yaw_rad),
            accel_noise_std: 0.0,
            gyro_noise_std: 0.0,
            accel_bias: 0.0,
            gyro_bias: 0.0,
        }
    }
}

/// Augment one trial with the default configuration.
pub fn augment(
    trial: &ImuTrial,
    annotations: &[StrideAnnotation],
    seed: u64,
) -> (ImuTrial, Vec<StrideAnnotation>) {
    augment_with(trial, annotations, &AugmentConfig::default(), seed)
}

/// Augment one trial. Stride labels are copied unchanged by construction.
pub fn augment_with(
    trial: &ImuTrial,
    annotations: &[StrideAnnotation],
    cfg: &AugmentConfig,
    seed: u64,
) -> (ImuTrial, Vec<StrideAnnotation>) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[0xA06]));
    let mut out = trial.clone();

    let yaw = match cfg.yaw {
        Yaw::Fixed(a) => a,
        Yaw::Uniform { max_abs } => {
            if max_abs > 0.0 {
                Uniform::new_inclusive(-max_abs, max_abs)
                    .unwrap()
                    .sample(&mut rng)
            } else {
                0.0
            }
        }
    };

    let accel_bias = if cfg.accel_bias > 0.0 {
        let u = Uniform::new_inclusive(-cfg.accel_bias, cfg.accel_bias).unwrap();
        [u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng)]
    } else {
        [0.0; 3]
    };
    let gyro_bias = if cfg.gyro_bias > 0.0 {
        let u = Uniform::new_inclusive(-cfg.gyro_bias, cfg.gyro_bias).unwrap();
        [u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng)]
    } else {
        [0.0; 3]
    };

    let q = (yaw != 0.0).then(|| Quat::from_axis_angle([0.0, 0.0, 1.0], yaw));
    let accel_noise = (cfg.accel_noise_std > 0.0).then(|| Normal::new(0.0, cfg.accel_noise_std).unwrap());
    let gyro_noise = (cfg.gyro_noise_std > 0.0).then(|| Normal::new(0.0, cfg.gyro_noise_std).unwrap());

    for s in out.samples.iter_mut() {
        if let Some(q) = q {
            s.accel = q.rotate_inv(s.accel);
            s.gyro = q.rotate_inv(s.gyro);
        }
        for c in 0..3 {
            s.accel[c] += accel_bias[c];
            s.gyro[c] += gyro_bias[c];
            if let Some(nd) = &accel_noise {
                s.accel[c] += nd.sample(&mut rng);
            }
            if let Some(nd) = &gyro_noise {
                s.gyro[c] += nd.sample(&mut rng);
            }
        }
    }
    (out, annotations.to_vec())
}

/// Produce `n` distinct augmented copies with per-copy derived seeds.
pub fn augment_batch(
    trial: &ImuTrial,
    annotations: &[StrideAnnotation],
    cfg: &AugmentConfig,
    n: usize,
    seed: u64,
) -> Vec<(ImuTrial, Vec<StrideAnnotation>)> {
    (0..n)
        .map(|k| augment_with(trial, annotations, cfg, mix(seed, &[k as u64])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_trial, TrialParams};
    use crate::profile::sample_profile;
    use gait_core::{Foot, GaitType};

    fn base() -> (ImuTrial, Vec<StrideAnnotation>) {
        let profile = sample_profile(GaitType::Normal, 2);
        generate_trial(
            &profile,
            TrialParams {
                subject_id: 1,
                foot: Foot::Left,
                trial_index: 0,
            },
            6,
            200.0,
            31,
        )
        .unwrap()
    }

    #[test]
    fn zero_rotation_zero_noise_is_identity() {
        let (trial, anns) = base();
        let (out, out_anns) = augment_with(&trial, &anns, &AugmentConfig::rotation_only(0.0), 5);
        assert_eq!(trial, out);
        assert_eq!(anns, out_anns);
    }

    #[test]
    fn labels_never_change() {
        let (trial, anns) = base();
        let copies = augment_batch(&trial, &anns, &AugmentConfig::default(), 50, 7);
        assert_eq!(copies.len(), 50);
        for (aug_trial, aug_anns) in &copies {
            assert_eq!(aug_anns.len(), anns.len());
            for (a, b) in anns.iter().zip(aug_anns) {
                assert_eq!(a.stride_length_m, b.stride_length_m);
                assert_eq!(a.interval(), b.interval());
            }
            assert_eq!(aug_trial.len(), trial.len());
        }
        // All copies distinct from the source and from each other.
        for (i, (a, _)) in copies.iter().enumerate() {
            assert_ne!(a, &trial);
            for (b, _) in copies.iter().skip(i + 1) {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn rotation_preserves_accel_magnitude() {
        let (trial, anns) = base();
        let (out, _) = augment_with(
            &trial,
            &anns,
            &AugmentConfig::rotation_only(0.6),
            5,
        );
        for (a, b) in trial.samples.iter().zip(&out.samples) {
            let ma = gait_core::math::norm(a.accel);
            let mb = gait_core::math::norm(b.accel);
            assert!((ma - mb).abs() < 1e-9);
        }
    }
}
