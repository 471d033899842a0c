//! Kinematic foot-trajectory generator.
//!
//! Each trial is: a stationary lead-in (>= 2 s), `n_strides` strides, and a
//! stationary tail. A stride is a stance phase (foot at rest, accel = gravity
//! in the body frame, zero gyro) followed by a swing phase built from three
//! closed-form profiles in normalized swing time u = t/T:
//!
//! - forward:   minimum-jerk displacement, accel shape 60u - 180u^2 + 120u^3
//! - vertical:  clearance c * sin^4(pi u), accel ~ cos(2 pi u) - cos(4 pi u)
//! - pitch:     theta_pk * sin^2(pi u), rate ~ sin(2 pi u)
//!
//! These shapes are chosen so the *sampled* signals integrate exactly under
//! the trapezoidal rule: the minimum-jerk accel is a cubic whose composite
//! trapezoid sum telescopes without error, and the vertical/pitch shapes are
//! full-period trig polynomials whose sample sums vanish identically. A
//! per-stride scale factor then pins the discrete double-integrated forward
//! displacement to the annotated stride length, so velocity returns to
//! exactly zero at every heel strike and labels are recoverable from the
//! world-frame acceleration to floating-point precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use gait_core::math::{Quat, Vec3};
use gait_core::{Foot, GaitType, ImuSample, ImuTrial, StrideAnnotation, GRAVITY};

use crate::error::SynthError;
use crate::profile::GaitProfile;

/// Identifies whose trial is being generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialParams {
    pub subject_id: u32,
    pub foot: Foot,
    pub trial_index: u32,
}

/// Ground-truth world-frame kinematics of an ideal (noise-free) trial.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealKinematics {
    /// Gravity-removed world-frame acceleration per sample, m/s².
    pub world_accel: Vec<Vec3>,
    /// Trapezoid-integrated world velocity, m/s.
    pub world_vel: Vec<Vec3>,
    /// Trapezoid-integrated world position, m.
    pub world_pos: Vec<Vec3>,
    /// Body-to-world attitude per sample.
    pub attitude: Vec<Quat>,
}

/// Stationary padding before and after the strides, seconds.
pub const STATIONARY_PAD_S: f64 = 2.25;

/// Minimum-jerk forward acceleration shape on u in [0, 1] (unit length/time).
fn minjerk_accel(u: f64) -> f64 {
    60.0 * u - 180.0 * u * u + 120.0 * u * u * u
}

/// Vertical clearance acceleration shape for z(u) = sin^4(pi u), unit
/// clearance and time: z'' = 2 pi^2 (cos 2 pi u - cos 4 pi u).
fn clearance_accel(u: f64) -> f64 {
    let two_pi_u = 2.0 * std::f64::consts::PI * u;
    2.0 * std::f64::consts::PI * std::f64::consts::PI * (two_pi_u.cos() - (2.0 * two_pi_u).cos())
}

/// Swing pitch angle shape sin^2(pi u), unit peak.
fn pitch_angle(u: f64) -> f64 {
    let s = (std::f64::consts::PI * u).sin();
    s * s
}

/// Swing pitch rate shape for unit peak and time: pi sin(2 pi u).
fn pitch_rate(u: f64) -> f64 {
    std::f64::consts::PI * (2.0 * std::f64::consts::PI * u).sin()
}

/// Discrete double-trapezoid displacement of an acceleration sample sequence.
fn double_trapezoid(accel: &[f64], dt: f64) -> f64 {
    let mut v = 0.0;
    let mut p = 0.0;
    for k in 1..accel.len() {
        let v_next = v + 0.5 * dt * (accel[k - 1] + accel[k]);
        p += 0.5 * dt * (v + v_next);
        v = v_next;
    }
    p
}

struct StridePlan {
    length_m: f64,
    n_stride: usize,
    n_stance: usize,
}

fn plan_strides(
    profile: &GaitProfile,
    foot: Foot,
    n_strides: usize,
    rate: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<StridePlan> {
    let length_factor = profile.length_factor(foot);
    let stance_fraction = profile.stance_fraction_for(foot);
    let mean_len = profile.mean_stride_length_m * length_factor;

    // Shuffle strides are a two-state process: mostly small strides with an
    // occasional larger one, plus additive jitter.
    let shuffle_base = if profile.gait_type == GaitType::Shuffle {
        mean_len / (1.0 + profile.p_big * (profile.big_stride_factor - 1.0))
    } else {
        mean_len
    };

    (0..n_strides)
        .map(|_| {
            let length_m = if profile.gait_type == GaitType::Shuffle {
                let is_big = rng.random_range(0.0..1.0) < profile.p_big;
                let level = shuffle_base
                    * if is_big {
                        profile.big_stride_factor
                    } else {
                        1.0
                    };
                let jitter = if profile.stride_length_std_m > 0.0 {
                    Normal::new(0.0, profile.stride_length_std_m)
                        .unwrap()
                        .sample(rng)
                } else {
                    0.0
                };
                (level + jitter).max(0.0)
            } else if profile.stride_length_std_m > 0.0 {
                Normal::new(mean_len, profile.stride_length_std_m)
                    .unwrap()
                    .sample(rng)
                    .max(0.0)
            } else {
                mean_len
            };

            let time_jitter = Normal::new(profile.mean_stride_time_s, 0.035 * profile.mean_stride_time_s)
                .unwrap()
                .sample(rng);
            let stride_time = time_jitter.clamp(
                0.5 * profile.mean_stride_time_s,
                1.5 * profile.mean_stride_time_s,
            );
            let n_stride = ((stride_time * rate).round() as usize).max(8);

            let sf = Normal::new(stance_fraction, 0.008)
                .unwrap()
                .sample(rng)
                .clamp(0.46, 0.84);
            let n_stance = ((sf * n_stride as f64).round() as usize).clamp(4, n_stride - 4);

            StridePlan {
                length_m,
                n_stride,
                n_stance,
            }
        })
        .collect()
}

/// Generate one ideal (noise-free) trial plus its annotations.
pub fn generate_trial(
    profile: &GaitProfile,
    params: TrialParams,
    n_strides: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<(ImuTrial, Vec<StrideAnnotation>), SynthError> {
    generate_trial_detailed(profile, params, n_strides, sample_rate_hz, seed)
        .map(|(trial, anns, _)| (trial, anns))
}

/// As [`generate_trial`] but also returns the world-frame kinematics.
pub fn generate_trial_detailed(
    profile: &GaitProfile,
    params: TrialParams,
    n_strides: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<(ImuTrial, Vec<StrideAnnotation>, IdealKinematics), SynthError> {
    profile.validate()?;
    if n_strides < 1 {
        return Err(SynthError::InvalidArgument(
            "n_strides must be at least 1".into(),
        ));
    }
    if !(sample_rate_hz.is_finite() && sample_rate_hz >= 50.0) {
        return Err(SynthError::InvalidArgument(format!(
            "sample rate must be at least 50 Hz, got {sample_rate_hz}"
        )));
    }

    let rate = sample_rate_hz;
    let dt = 1.0 / rate;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans = plan_strides(profile, params.foot, n_strides, rate, &mut rng);

    let pad = (STATIONARY_PAD_S * rate).round() as usize;
    let total = 2 * pad + plans.iter().map(|p| p.n_stride).sum::<usize>();

    let mut accel_world = vec![[0.0f64; 3]; total];
    let mut pitch = vec![0.0f64; total];
    let mut pitch_rate_samples = vec![0.0f64; total];
    let mut annotations = Vec::with_capacity(n_strides);

    let clearance_factor = profile.clearance_factor(params.foot);
    let pitch_peak_base = profile.swing_pitch_peak_deg.to_radians() * clearance_factor;
    let mean_len = profile.mean_stride_length_m;

    let mut hs = pad;
    for plan in &plans {
        let to = hs + plan.n_stance;
        let next_hs = hs + plan.n_stride;
        let n_swing = plan.n_stride - plan.n_stance;
        let swing_t = n_swing as f64 * dt;

        // Forward accel: sample the unit shape, then scale so the discrete
        // double integral equals the annotated length exactly.
        let shape: Vec<f64> = (0..=n_swing)
            .map(|i| minjerk_accel(i as f64 / n_swing as f64) / (swing_t * swing_t))
            .collect();
        let d_raw = double_trapezoid(&shape, dt);
        let lambda = if d_raw.abs() > 1e-30 {
            plan.length_m / d_raw
        } else {
            0.0
        };

        // Clearance and pitch amplitudes track the stride length so small
        // shuffling strides also look small on the sensors.
        let amp_scale = if mean_len > 0.0 {
            (plan.length_m / mean_len).clamp(0.0, 2.5)
        } else {
            0.0
        };
        let clearance = profile.clearance_m * clearance_factor * amp_scale;
        let pitch_peak = pitch_peak_base * amp_scale;

        for i in 0..=n_swing {
            let u = i as f64 / n_swing as f64;
            let k = to + i;
            if k >= total {
                break;
            }
            accel_world[k][0] = lambda * shape[i];
            accel_world[k][2] = clearance * clearance_accel(u) / (swing_t * swing_t);
            pitch[k] = pitch_peak * pitch_angle(u);
            pitch_rate_samples[k] = pitch_peak * pitch_rate(u) / swing_t;
        }

        annotations.push(StrideAnnotation::from_indices(
            params.foot,
            hs,
            to,
            next_hs,
            plan.length_m,
            rate,
        )?);
        hs = next_hs;
    }

    // World kinematics by trapezoidal integration; stance velocity stays at
    // exactly zero because every swing shape integrates back to zero.
    let mut vel = vec![[0.0f64; 3]; total];
    let mut pos = vec![[0.0f64; 3]; total];
    for k in 1..total {
        for c in 0..3 {
            let v_next = vel[k - 1][c] + 0.5 * dt * (accel_world[k - 1][c] + accel_world[k][c]);
            pos[k][c] = pos[k - 1][c] + 0.5 * dt * (vel[k - 1][c] + v_next);
            vel[k][c] = v_next;
        }
    }

    let mut samples = Vec::with_capacity(total);
    let mut attitude = Vec::with_capacity(total);
    for k in 0..total {
        let q = Quat::from_axis_angle([0.0, 1.0, 0.0], pitch[k]);
        let f_world = [
            accel_world[k][0],
            accel_world[k][1],
            accel_world[k][2] + GRAVITY,
        ];
        samples.push(ImuSample {
            t: k as f64 * dt,
            accel: q.rotate_inv(f_world),
            gyro: [0.0, pitch_rate_samples[k], 0.0],
        });
        attitude.push(q);
    }

    let trial = ImuTrial::new(
        samples,
        rate,
        params.subject_id,
        profile.gait_type,
        params.foot,
        params.trial_index,
    )?;

    Ok((
        trial,
        annotations,
        IdealKinematics {
            world_accel: accel_world,
            world_vel: vel,
            world_pos: pos,
            attitude,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::sample_profile;
    use approx::assert_relative_eq;

    const RATE: f64 = 200.0;

    fn params(foot: Foot) -> TrialParams {
        TrialParams {
            subject_id: 1,
            foot,
            trial_index: 0,
        }
    }

    /// Independent double-integration oracle over the generator's own
    /// world-frame, gravity-removed acceleration samples.
    #[test]
    fn double_integration_reproduces_stride_labels() {
        for gait in GaitType::ALL {
            let profile = sample_profile(gait, 7);
            let (trial, anns, kin) =
                generate_trial_detailed(&profile, params(Foot::Left), 10, RATE, 99).unwrap();
            let dt = trial.dt();
            for ann in &anns {
                let (start, end) = ann.interval();
                let mut vx = 0.0;
                let mut vy = 0.0;
                let mut dx = 0.0;
                let mut dy = 0.0;
                for k in start + 1..=end {
                    let vx_next = vx + 0.5 * dt * (kin.world_accel[k - 1][0] + kin.world_accel[k][0]);
                    let vy_next = vy + 0.5 * dt * (kin.world_accel[k - 1][1] + kin.world_accel[k][1]);
                    dx += 0.5 * dt * (vx + vx_next);
                    dy += 0.5 * dt * (vy + vy_next);
                    vx = vx_next;
                    vy = vy_next;
                }
                let recovered = (dx * dx + dy * dy).sqrt();
                assert!(
                    (recovered - ann.stride_length_m).abs() < 1e-6,
                    "{gait:?}: recovered {recovered} vs label {}",
                    ann.stride_length_m
                );
            }
        }
    }

    #[test]
    fn velocity_is_zero_during_stance() {
        let profile = sample_profile(GaitType::Normal, 3);
        let (trial, anns, kin) =
            generate_trial_detailed(&profile, params(Foot::Right), 8, RATE, 12).unwrap();
        // Lead/tail pads plus every annotated stance interval.
        let mut stationary: Vec<(usize, usize)> = vec![
            (0, anns[0].hs_index),
            (anns.last().unwrap().next_hs_index, trial.len()),
        ];
        stationary.extend(anns.iter().map(|a| (a.hs_index, a.to_index)));
        for (s, e) in stationary {
            for k in s..e {
                let speed = gait_core::math::norm(kin.world_vel[k]);
                assert!(speed < 1e-9, "speed {speed} at sample {k}");
            }
        }
    }

    #[test]
    fn stationary_accel_magnitude_is_gravity() {
        let profile = sample_profile(GaitType::Shuffle, 21);
        let (trial, anns, _) =
            generate_trial_detailed(&profile, params(Foot::Left), 6, RATE, 5).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        let in_stance = |k: usize| {
            k < anns[0].hs_index
                || k >= anns.last().unwrap().next_hs_index
                || anns.iter().any(|a| k >= a.hs_index && k < a.to_index)
        };
        for (k, s) in trial.samples.iter().enumerate() {
            if in_stance(k) {
                sum += gait_core::math::norm(s.accel);
                count += 1;
            }
        }
        assert_relative_eq!(sum / count as f64, GRAVITY, epsilon = 1e-9);
    }

    #[test]
    fn zero_stride_profile_is_flat_gravity() {
        let mut profile = sample_profile(GaitType::Normal, 1);
        profile.mean_stride_length_m = 0.0;
        profile.stride_length_std_m = 0.0;
        let (trial, _, _) = generate_trial_detailed(&profile, params(Foot::Left), 4, RATE, 8)
            .map(|x| (x.0, x.1, x.2))
            .unwrap();
        for s in &trial.samples {
            assert_relative_eq!(gait_core::math::norm(s.accel), GRAVITY, epsilon = 1e-12);
            assert_eq!(s.gyro, [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn dragging_foot_has_weaker_gyro_peak() {
        let profile = sample_profile(GaitType::Stroke, 17);
        let drag = profile.drag_foot;
        let normal_foot = if drag == Foot::Left { Foot::Right } else { Foot::Left };
        let (t_drag, _, _) =
            generate_trial_detailed(&profile, params(drag), 8, RATE, 33).unwrap();
        let (t_norm, _, _) =
            generate_trial_detailed(&profile, params(normal_foot), 8, RATE, 33).unwrap();
        let peak = |t: &ImuTrial| {
            t.samples
                .iter()
                .map(|s| gait_core::math::norm(s.gyro))
                .fold(0.0f64, f64::max)
        };
        assert!(
            peak(&t_drag) < peak(&t_norm),
            "drag peak {} !< normal peak {}",
            peak(&t_drag),
            peak(&t_norm)
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let profile = sample_profile(GaitType::Normal, 4);
        let a = generate_trial(&profile, params(Foot::Left), 6, RATE, 42).unwrap();
        let b = generate_trial(&profile, params(Foot::Left), 6, RATE, 42).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let profile = sample_profile(GaitType::Normal, 4);
        assert!(generate_trial(&profile, params(Foot::Left), 0, RATE, 1).is_err());
        assert!(generate_trial(&profile, params(Foot::Left), 5, 20.0, 1).is_err());
        let mut bad = profile.clone();
        bad.stance_fraction = 0.95;
        assert!(generate_trial(&bad, params(Foot::Left), 5, RATE, 1).is_err());
    }

    #[test]
    fn padding_is_at_least_two_seconds() {
        let profile = sample_profile(GaitType::Stroke, 9);
        let (trial, anns, _) =
            generate_trial_detailed(&profile, params(Foot::Left), 3, RATE, 2).unwrap();
        let lead = anns[0].hs_index as f64 * trial.dt();
        let tail = (trial.len() - anns.last().unwrap().next_hs_index) as f64 * trial.dt();
        assert!(lead >= 2.0, "lead pad {lead}");
        assert!(tail >= 2.0, "tail pad {tail}");
    }
}
