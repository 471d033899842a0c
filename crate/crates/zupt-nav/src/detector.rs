//! SHOE-style stance detection.
//!
//! Per-sample statistic over a centered window w of length W:
//!
//!   T = (1/W) Σ_{j in w} [ ||a_j − g · ā/||ā|| ||² / σ_a²  +  ||ω_j||² / σ_g² ]
//!
//! where ā is the window-mean accelerometer vector. A sample is stationary
//! iff T < gamma. Morphological cleanup then drops stance runs shorter than
//! `min_stance_samples` and fills swing gaps shorter than `min_swing_samples`.

use gait_core::math::{norm, scale, sub};
use gait_core::{ImuTrial, GRAVITY};

use crate::config::ZuptConfig;
use crate::error::ZuptError;

/// Iterate maximal runs of equal mask value; calls `f(start, end, value)`.
pub(crate) fn for_each_run(mask: &[bool], mut f: impl FnMut(usize, usize, bool)) {
    let mut start = 0usize;
    for i in 1..=mask.len() {
        if i == mask.len() || mask[i] != mask[start] {
            f(start, i, mask[start]);
            start = i;
        }
    }
}

fn cleanup(mask: &mut [bool], min_stance: usize, min_swing: usize) {
    // Fill flicker gaps first so a noisy stance is reunited before the
    // short-stance pass judges its length.
    let mut fills: Vec<(usize, usize)> = Vec::new();
    for_each_run(mask, |s, e, v| {
        // Interior swing gaps only: leading/trailing moving runs stay.
        if !v && e - s < min_swing && s > 0 && e < mask.len() {
            fills.push((s, e));
        }
    });
    for (s, e) in fills {
        mask[s..e].iter_mut().for_each(|m| *m = true);
    }
    let mut drops: Vec<(usize, usize)> = Vec::new();
    for_each_run(mask, |s, e, v| {
        if v && e - s < min_stance {
            drops.push((s, e));
        }
    });
    for (s, e) in drops {
        mask[s..e].iter_mut().for_each(|m| *m = false);
    }
}

/// Per-sample stationary mask for a trial.
pub fn detect_stationary(trial: &ImuTrial, cfg: &ZuptConfig) -> Result<Vec<bool>, ZuptError> {
    cfg.validate()?;
    let n = trial.len();
    let w = cfg.window_len;
    if n < w {
        return Err(ZuptError::TrialTooShort { len: n, window: w });
    }

    let inv_sa2 = 1.0 / (cfg.sigma_a * cfg.sigma_a);
    let inv_sg2 = 1.0 / (cfg.sigma_g * cfg.sigma_g);
    let mut mask = vec![false; n];

    // Prefix sums make the window means O(1) per sample.
    let mut acc_prefix = vec![[0.0f64; 3]; n + 1];
    for (k, s) in trial.samples.iter().enumerate() {
        for c in 0..3 {
            acc_prefix[k + 1][c] = acc_prefix[k][c] + s.accel[c];
        }
    }

    for i in 0..n {
        let start = i.saturating_sub(w / 2).min(n - w);
        let end = start + w;
        let mean = [
            (acc_prefix[end][0] - acc_prefix[start][0]) / w as f64,
            (acc_prefix[end][1] - acc_prefix[start][1]) / w as f64,
            (acc_prefix[end][2] - acc_prefix[start][2]) / w as f64,
        ];
        let mag = norm(mean);
        let gref = if mag > 0.0 {
            scale(mean, GRAVITY / mag)
        } else {
            [0.0, 0.0, GRAVITY]
        };
        let mut t_stat = 0.0;
        for s in &trial.samples[start..end] {
            let da = sub(s.accel, gref);
            t_stat += (da[0] * da[0] + da[1] * da[1] + da[2] * da[2]) * inv_sa2;
            t_stat += (s.gyro[0] * s.gyro[0] + s.gyro[1] * s.gyro[1] + s.gyro[2] * s.gyro[2])
                * inv_sg2;
        }
        mask[i] = t_stat / (w as f64) < cfg.gamma;
    }

    cleanup(&mut mask, cfg.min_stance_samples, cfg.min_swing_samples);
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::{Foot, GaitType, ImuSample};

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
    fn constant_gravity_is_all_stationary() {
        let n = 400;
        let trial = trial_from(vec![[0.0, 0.0, GRAVITY]; n], vec![[0.0; 3]; n]);
        let mask = detect_stationary(&trial, &ZuptConfig::default()).unwrap();
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn large_gyro_segment_has_no_stationary_samples() {
        let n = 600;
        let mut accel = vec![[0.0, 0.0, GRAVITY]; n];
        let mut gyro = vec![[0.0; 3]; n];
        for k in 200..400 {
            gyro[k] = [0.0, 3.0, 0.0];
            accel[k] = [2.0, 0.0, GRAVITY];
        }
        let trial = trial_from(accel, gyro);
        let mask = detect_stationary(&trial, &ZuptConfig::default()).unwrap();
        // Interior of the swing (away from window smear) must be moving.
        assert!(mask[205..395].iter().all(|&m| !m));
        assert!(mask[..195].iter().all(|&m| m));
        assert!(mask[405..].iter().all(|&m| m));
    }

    #[test]
    fn short_trial_is_rejected() {
        let trial = trial_from(vec![[0.0, 0.0, GRAVITY]; 2], vec![[0.0; 3]; 2]);
        let cfg = ZuptConfig {
            window_len: 5,
            ..ZuptConfig::default()
        };
        assert!(matches!(
            detect_stationary(&trial, &cfg),
            Err(ZuptError::TrialTooShort { .. })
        ));
    }

    #[test]
    fn cleanup_drops_short_stance_and_fills_short_swing() {
        let mut mask = vec![false; 100];
        mask[10..20].iter_mut().for_each(|m| *m = true); // short stance
        mask[40..80].iter_mut().for_each(|m| *m = true); // long stance
        mask[50..55].iter_mut().for_each(|m| *m = false); // short gap inside
        cleanup(&mut mask, 25, 15);
        assert!(mask[10..20].iter().all(|&m| !m));
        assert!(mask[40..80].iter().all(|&m| m));
    }
}
