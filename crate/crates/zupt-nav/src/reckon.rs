//! Gravity subtraction, trapezoidal double integration, zero-velocity
//! resets with per-swing linear de-drift.

use std::path::Path;

use gait_core::math::Quat;
use gait_core::{ImuTrial, GRAVITY};

use crate::detector::for_each_run;
use crate::error::ZuptError;

/// Full navigation solution for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct NavSolution {
    /// Body-to-world attitude per sample, unit norm.
    pub quaternions: Vec<Quat>,
    /// Gravity-removed world acceleration, m/s².
    pub world_accel: Vec<[f64; 3]>,
    /// ZUPT-corrected world velocity, m/s; exactly zero on stationary samples.
    pub velocity: Vec<[f64; 3]>,
    /// World position, m.
    pub position: Vec<[f64; 3]>,
    pub stationary_mask: Vec<bool>,
}

/// Dead-reckon a trial given its attitude estimate and stationary mask.
pub fn dead_reckon(
    trial: &ImuTrial,
    quats: &[Quat],
    mask: &[bool],
) -> Result<NavSolution, ZuptError> {
    let n = trial.len();
    if quats.len() != n {
        return Err(ZuptError::LengthMismatch {
            trial: n,
            what: "quaternions",
            got: quats.len(),
        });
    }
    if mask.len() != n {
        return Err(ZuptError::LengthMismatch {
            trial: n,
            what: "mask",
            got: mask.len(),
        });
    }

    let dt = trial.dt();
    let mut world_accel = Vec::with_capacity(n);
    for (s, q) in trial.samples.iter().zip(quats) {
        let f = q.rotate(s.accel);
        world_accel.push([f[0], f[1], f[2] - GRAVITY]);
    }

    // Raw trapezoidal velocity.
    let mut velocity = vec![[0.0f64; 3]; n];
    for k in 1..n {
        for c in 0..3 {
            velocity[k][c] =
                velocity[k - 1][c] + 0.5 * dt * (world_accel[k - 1][c] + world_accel[k][c]);
        }
    }

    // ZUPT corrections: for each stationary run, remove the accumulated
    // velocity error linearly across the preceding swing, then clamp the
    // run itself to exactly zero.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for_each_run(mask, |s, e, v| {
        if v {
            runs.push((s, e));
        }
    });
    let mut prev_end: Option<usize> = None;
    for &(s, e) in &runs {
        if let Some(pe) = prev_end {
            if s > pe {
                let v_err = velocity[s];
                let span = (s - pe) as f64;
                for j in pe..s {
                    let w = (j + 1 - pe) as f64 / span;
                    for c in 0..3 {
                        velocity[j][c] -= w * v_err[c];
                    }
                }
            }
        }
        for v in velocity[s..e].iter_mut() {
            *v = [0.0, 0.0, 0.0];
        }
        prev_end = Some(e);
    }

    let mut position = vec![[0.0f64; 3]; n];
    for k in 1..n {
        for c in 0..3 {
            position[k][c] = position[k - 1][c] + 0.5 * dt * (velocity[k - 1][c] + velocity[k][c]);
        }
    }

    Ok(NavSolution {
        quaternions: quats.to_vec(),
        world_accel,
        velocity,
        position,
        stationary_mask: mask.to_vec(),
    })
}

/// Per-trial debug dump: `t,stationary,vx,vy,vz,px,py,pz`.
pub fn dump_debug_csv(trial: &ImuTrial, nav: &NavSolution, path: &Path) -> Result<(), ZuptError> {
    let mut buf = String::with_capacity(trial.len() * 64);
    buf.push_str("t,stationary,vx,vy,vz,px,py,pz\n");
    for (k, s) in trial.samples.iter().enumerate() {
        buf.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.t,
            u8::from(nav.stationary_mask[k]),
            nav.velocity[k][0],
            nav.velocity[k][1],
            nav.velocity[k][2],
            nav.position[k][0],
            nav.position[k][1],
            nav.position[k][2],
        ));
    }
    std::fs::write(path, buf).map_err(|e| ZuptError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::{Foot, GaitType, ImuSample};

    fn level_trial(world_ax: &[f64]) -> ImuTrial {
        let samples = world_ax
            .iter()
            .enumerate()
            .map(|(i, &ax)| ImuSample {
                t: i as f64 / 200.0,
                accel: [ax, 0.0, GRAVITY],
                gyro: [0.0; 3],
            })
            .collect();
        ImuTrial::new(samples, 200.0, 0, GaitType::Normal, Foot::Left, 0).unwrap()
    }

    #[test]
    fn all_stationary_trial_stays_at_origin() {
        let trial = level_trial(&[0.0; 500]);
        let quats = vec![Quat::IDENTITY; 500];
        let mask = vec![true; 500];
        let nav = dead_reckon(&trial, &quats, &mask).unwrap();
        for k in 0..500 {
            assert_eq!(nav.velocity[k], [0.0, 0.0, 0.0]);
            assert_eq!(nav.position[k], [0.0, 0.0, 0.0]);
        }
    }

    /// Symmetric ±2 m/s² bursts of 50 samples each: the discrete trapezoid
    /// double integral is exactly 0.125 m.
    #[test]
    fn triangle_profile_closed_form_displacement() {
        let pad = 500usize;
        let mut ax = vec![0.0; 2 * pad + 100];
        for k in 0..50 {
            ax[pad + k] = 2.0;
            ax[pad + 50 + k] = -2.0;
        }
        let n = ax.len();
        let trial = level_trial(&ax);
        let quats = vec![Quat::IDENTITY; n];
        let mut mask = vec![true; n];
        mask[pad..pad + 100].iter_mut().for_each(|m| *m = false);
        let nav = dead_reckon(&trial, &quats, &mask).unwrap();
        let displacement = nav.position[n - 1][0] - nav.position[0][0];
        assert!(
            (displacement - 0.125).abs() < 1e-6,
            "displacement {displacement}"
        );
    }

    #[test]
    fn velocity_is_exactly_zero_on_stationary_samples() {
        let mut ax = vec![0.0; 900];
        for k in 0..60 {
            ax[400 + k] = 1.0;
        }
        let n = ax.len();
        let trial = level_trial(&ax);
        let quats = vec![Quat::IDENTITY; n];
        let mut mask = vec![true; n];
        mask[395..475].iter_mut().for_each(|m| *m = false);
        let nav = dead_reckon(&trial, &quats, &mask).unwrap();
        for k in 0..n {
            if mask[k] {
                assert_eq!(nav.velocity[k], [0.0, 0.0, 0.0], "sample {k}");
            }
        }
    }
}
