//! IMU sensor-error model: white noise, random-walk bias, constant initial
//! bias, and a small fixed mount misalignment.
//!
//! Every noise source draws from its own sub-stream derived from the call
//! seed with [`crate::seed::mix`] and a fixed stream tag, so disabling one
//! source never shifts the draws of another. The tags below are part of the
//! contract (tests re-simulate individual sources from them).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use gait_core::math::Quat;
use gait_core::ImuTrial;

use crate::seed::mix;

pub const STREAM_ACCEL_NOISE: u64 = 1;
pub const STREAM_GYRO_NOISE: u64 = 2;
pub const STREAM_ACCEL_WALK: u64 = 3;
pub const STREAM_GYRO_WALK: u64 = 4;
pub const STREAM_INITIAL_BIAS: u64 = 5;
pub const STREAM_MOUNT: u64 = 6;

/// Sensor-error magnitudes. All non-negative; zeros disable a source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorNoiseConfig {
    /// White accelerometer noise STD per axis per sample, m/s².
    pub accel_noise_std: f64,
    /// White gyroscope noise STD per axis per sample, rad/s.
    pub gyro_noise_std: f64,
    /// Accelerometer bias random-walk intensity, m/s²·√s.
    pub accel_bias_walk_std: f64,
    /// Gyroscope bias random-walk intensity, rad/s·√s.
    pub gyro_bias_walk_std: f64,
    /// Constant initial accelerometer bias drawn uniformly in ±this, m/s².
    pub accel_initial_bias: f64,
    /// Constant initial gyroscope bias drawn uniformly in ±this, rad/s.
    pub gyro_initial_bias: f64,
    /// Fixed mount misalignment angle, degrees (random axis per seed).
    pub mount_misalignment_deg: f64,
}

impl SensorNoiseConfig {
    /// Everything off: `apply_sensor_model` becomes the identity.
    pub fn zero() -> Self {
        SensorNoiseConfig {
            accel_noise_std: 0.0,
            gyro_noise_std: 0.0,
            accel_bias_walk_std: 0.0,
            gyro_bias_walk_std: 0.0,
            accel_initial_bias: 0.0,
            gyro_initial_bias: 0.0,
            mount_misalignment_deg: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), crate::SynthError> {
        let fields = [
            self.accel_noise_std,
            self.gyro_noise_std,
            self.accel_bias_walk_std,
            self.gyro_bias_walk_std,
            self.accel_initial_bias,
            self.gyro_initial_bias,
            self.mount_misalignment_deg,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(crate::SynthError::InvalidArgument(
                "sensor noise parameters must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SensorNoiseConfig {
    /// Consumer-MEMS-like defaults at 200 Hz.
    fn default() -> Self {
        SensorNoiseConfig {
            accel_noise_std: 0.06,
            gyro_noise_std: 0.015,
            accel_bias_walk_std: 0.03,
            gyro_bias_walk_std: 0.004,
            accel_initial_bias: 0.10,
            gyro_initial_bias: 0.015,
            mount_misalignment_deg: 1.5,
        }
    }
}

/// Simulate a bias random walk: per-sample steps N(0, std·√dt), starting at 0.
///
/// Exposed so tests can re-simulate a walk stream independently.
pub fn bias_walk(seed: u64, stream: u64, n: usize, walk_std: f64, dt: f64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[stream]));
    let step = Normal::new(0.0, walk_std * dt.sqrt()).unwrap();
    let mut bias = [0.0f64; 3];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        for b in bias.iter_mut() {
            *b += step.sample(&mut rng);
        }
        out.push(bias);
    }
    out
}

/// Apply the sensor-error model to an ideal trial. Deterministic per seed;
/// an all-zero config returns the input bit-identically.
pub fn apply_sensor_model(trial: &ImuTrial, cfg: &SensorNoiseConfig, seed: u64) -> ImuTrial {
    let n = trial.len();
    let dt = trial.dt();
    let mut out = trial.clone();

    if *cfg == SensorNoiseConfig::zero() {
        return out;
    }

    let mount = if cfg.mount_misalignment_deg > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[STREAM_MOUNT]));
        let unit = Normal::new(0.0, 1.0).unwrap();
        let axis = [
            unit.sample(&mut rng),
            unit.sample(&mut rng),
            unit.sample(&mut rng),
        ];
        Some(Quat::from_axis_angle(
            axis,
            cfg.mount_misalignment_deg.to_radians(),
        ))
    } else {
        None
    };

    let (accel_bias0, gyro_bias0) = {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[STREAM_INITIAL_BIAS]));
        let mut draw = |range: f64| -> [f64; 3] {
            if range > 0.0 {
                let u = Uniform::new_inclusive(-range, range).unwrap();
                [u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng)]
            } else {
                [0.0; 3]
            }
        };
        (draw(cfg.accel_initial_bias), draw(cfg.gyro_initial_bias))
    };

    let accel_walk = if cfg.accel_bias_walk_std > 0.0 {
        Some(bias_walk(seed, STREAM_ACCEL_WALK, n, cfg.accel_bias_walk_std, dt))
    } else {
        None
    };
    let gyro_walk = if cfg.gyro_bias_walk_std > 0.0 {
        Some(bias_walk(seed, STREAM_GYRO_WALK, n, cfg.gyro_bias_walk_std, dt))
    } else {
        None
    };

    let mut accel_noise_rng = ChaCha8Rng::seed_from_u64(mix(seed, &[STREAM_ACCEL_NOISE]));
    let mut gyro_noise_rng = ChaCha8Rng::seed_from_u64(mix(seed, &[STREAM_GYRO_NOISE]));
    let accel_noise = (cfg.accel_noise_std > 0.0).then(|| Normal::new(0.0, cfg.accel_noise_std).unwrap());
    let gyro_noise = (cfg.gyro_noise_std > 0.0).then(|| Normal::new(0.0, cfg.gyro_noise_std).unwrap());

    for (k, s) in out.samples.iter_mut().enumerate() {
        if let Some(q) = mount {
            s.accel = q.rotate_inv(s.accel);
            s.gyro = q.rotate_inv(s.gyro);
        }
        for c in 0..3 {
            s.accel[c] += accel_bias0[c];
            s.gyro[c] += gyro_bias0[c];
            if let Some(w) = &accel_walk {
                s.accel[c] += w[k][c];
            }
            if let Some(w) = &gyro_walk {
                s.gyro[c] += w[k][c];
            }
            if let Some(nd) = &accel_noise {
                s.accel[c] += nd.sample(&mut accel_noise_rng);
            }
            if let Some(nd) = &gyro_noise {
                s.gyro[c] += nd.sample(&mut gyro_noise_rng);
            }
        }
    }
    out
}
