//! Orientation tracking: initial tilt from the stationary head segment,
//! midpoint gyro integration, complementary tilt correction toward measured
//! gravity on stationary samples.

use gait_core::math::{add, norm, scale, Quat, Vec3};
use gait_core::ImuTrial;

use crate::error::ZuptError;

/// Complementary-filter blend applied per stationary sample.
pub const TILT_BLEND_ALPHA: f64 = 0.02;

fn mean_accel(trial: &ImuTrial, range: std::ops::Range<usize>) -> Vec3 {
    let mut m = [0.0f64; 3];
    let len = range.len().max(1);
    for s in &trial.samples[range] {
        m = add(m, s.accel);
    }
    scale(m, 1.0 / len as f64)
}

/// Estimate per-sample body-to-world attitude. Yaw is unobservable without a
/// magnetometer and fixed to zero at the start.
pub fn estimate_orientation(trial: &ImuTrial, mask: &[bool]) -> Result<Vec<Quat>, ZuptError> {
    estimate_orientation_with_alpha(trial, mask, TILT_BLEND_ALPHA)
}

pub fn estimate_orientation_with_alpha(
    trial: &ImuTrial,
    mask: &[bool],
    alpha: f64,
) -> Result<Vec<Quat>, ZuptError> {
    let n = trial.len();
    if mask.len() != n {
        return Err(ZuptError::LengthMismatch {
            trial: n,
            what: "mask",
            got: mask.len(),
        });
    }
    if n == 0 || !mask[0] {
        return Err(ZuptError::NoInitialStance);
    }

    // Initial roll/pitch from the mean accel of the leading stationary run.
    let head_end = mask.iter().position(|&m| !m).unwrap_or(n);
    let g_body = mean_accel(trial, 0..head_end);
    let mut q = Quat::between(g_body, [0.0, 0.0, 1.0]);

    let dt = trial.dt();
    let up = [0.0, 0.0, 1.0];
    let mut quats = Vec::with_capacity(n);
    quats.push(q);

    for k in 1..n {
        let w_mid = scale(add(trial.samples[k - 1].gyro, trial.samples[k].gyro), 0.5 * dt);
        q = q.mul(Quat::from_rotvec(w_mid)).normalized();

        if mask[k] {
            // Pull the predicted gravity direction toward the measurement.
            let g_world = q.rotate(trial.samples[k].accel);
            if norm(g_world) > 1e-9 {
                let err = Quat::between(g_world, up);
                let angle = 2.0 * err.w.clamp(-1.0, 1.0).acos();
                if angle > 1e-12 {
                    let axis = [err.x, err.y, err.z];
                    let corr = Quat::from_axis_angle(axis, alpha * angle);
                    q = corr.mul(q).normalized();
                }
            }
        }
        quats.push(q);
    }
    Ok(quats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::{Foot, GaitType, ImuSample, GRAVITY};

    fn trial_from(accel: Vec<[f64; 3]>, gyro: Vec<[f64; 3]>) -> ImuTrial {
        let samples = accel
            .into_iter()
            .zip(gyro)
            .enumerate()
            .map(|(i, (a, g))| ImuSample {
                t: i as f64 / 200.0,
                accel: a,
                gyro: g,
            })
            .collect();
        ImuTrial::new(samples, 200.0, 0, GaitType::Normal, Foot::Left, 0).unwrap()
    }

    #[test]
    fn level_stationary_trial_gives_identity() {
        let n = 300;
        let trial = trial_from(vec![[0.0, 0.0, GRAVITY]; n], vec![[0.0; 3]; n]);
        let mask = vec![true; n];
        let quats = estimate_orientation(&trial, &mask).unwrap();
        for q in quats {
            assert!((q.w - 1.0).abs() < 1e-12);
            assert!(q.x.abs() < 1e-12 && q.y.abs() < 1e-12 && q.z.abs() < 1e-12);
        }
    }

    #[test]
    fn constant_pitch_rate_integrates_to_closed_form() {
        let rate_rad_s = 0.5;
        let head = 200usize;
        let spin = 400usize; // tau = 2 s
        let n = head + spin;
        let mut accel = vec![[0.0, 0.0, GRAVITY]; n];
        let mut gyro = vec![[0.0; 3]; n];
        for k in head..n {
            gyro[k] = [0.0, rate_rad_s, 0.0];
            accel[k] = [0.0, 0.0, 0.0]; // irrelevant during non-stationary samples
        }
        let trial = trial_from(accel, gyro);
        let mut mask = vec![false; n];
        mask[..head].iter_mut().for_each(|m| *m = true);

        let quats = estimate_orientation(&trial, &mask).unwrap();
        let v = quats[n - 1].rotate([1.0, 0.0, 0.0]);
        let pitch = (-v[2]).atan2(v[0]);
        // The ramp from 0 to the constant rate spans one midpoint step, so
        // the integrated angle is tau minus half a sample of rate.
        let expected = rate_rad_s * (spin as f64 - 0.5) / 200.0;
        assert!(
            (pitch - expected).abs() < 1e-6,
            "pitch {pitch} vs expected {expected}"
        );
    }

    #[test]
    fn missing_initial_stance_is_an_error() {
        let n = 100;
        let trial = trial_from(vec![[0.0, 0.0, GRAVITY]; n], vec![[0.0; 3]; n]);
        let mut mask = vec![true; n];
        mask[0] = false;
        assert!(matches!(
            estimate_orientation(&trial, &mask),
            Err(ZuptError::NoInitialStance)
        ));
    }

    #[test]
    fn quaternions_stay_normalized() {
        let n = 500;
        let mut gyro = vec![[0.0; 3]; n];
        for (k, g) in gyro.iter_mut().enumerate().skip(100) {
            *g = [
                (k as f64 * 0.01).sin() * 2.0,
                (k as f64 * 0.013).cos() * 1.5,
                0.3,
            ];
        }
        let trial = trial_from(vec![[0.0, 0.0, GRAVITY]; n], gyro);
        let mut mask = vec![false; n];
        mask[..100].iter_mut().for_each(|m| *m = true);
        let quats = estimate_orientation(&trial, &mask).unwrap();
        for q in quats {
            assert!((q.norm() - 1.0).abs() < 1e-9);
        }
    }
}
