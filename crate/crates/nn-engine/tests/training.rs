//! Training-loop contracts: determinism, freeze semantics, the overfit
//! sanity oracle.

use gait_synth::{generate_trial, sample_profile, TrialParams};
use gait_core::{Foot, GaitType};
use nn_engine::{fine_tune, train, Model, ModelSpec, TrainConfig};
use stride_seg::{apply_norm, fit_norm_stats, segment_ground_truth, StrideWindow};

/// Normalized windows from a couple of generated trials, mixed gaits.
fn sample_windows(n: usize, seed: u64) -> Vec<StrideWindow> {
    let mut windows = Vec::new();
    let mut k = 0u64;
    'outer: loop {
        for gait in [GaitType::Normal, GaitType::Shuffle] {
            let profile = sample_profile(gait, seed + k);
            let (trial, anns) = generate_trial(
                &profile,
                TrialParams {
                    subject_id: 1,
                    foot: Foot::Left,
                    trial_index: k as u32,
                },
                8,
                200.0,
                seed * 1000 + k,
            )
            .unwrap();
            windows.extend(segment_ground_truth(&trial, &anns));
            if windows.len() >= n {
                break 'outer;
            }
        }
        k += 1;
    }
    windows.truncate(n);
    let stats = fit_norm_stats(&windows).unwrap();
    windows.iter().map(|w| apply_norm(w, &stats)).collect()
}

fn small_model(seed: u64) -> Model {
    Model::init(ModelSpec::default_regressor(), seed).unwrap()
}

#[test]
fn zero_learning_rate_leaves_parameters_unchanged() {
    let windows = sample_windows(8, 3);
    let model = small_model(1);
    let cfg = TrainConfig {
        learning_rate: 0.0,
        batch_size: 8,
        epochs: 2,
        seed: 5,
        ..TrainConfig::default()
    };
    let (trained, history) = train(&model, &windows, &[], &cfg).unwrap();
    assert_eq!(history.len(), 2);
    // BN running stats do update; every actual parameter must not.
    for (name, t) in &model.params {
        if name.contains("running") {
            continue;
        }
        assert_eq!(t, trained.param(name).unwrap(), "{name} changed");
    }
}

#[test]
fn training_is_bitwise_deterministic() {
    let windows = sample_windows(24, 7);
    let cfg = TrainConfig {
        learning_rate: 1e-4,
        batch_size: 8,
        epochs: 3,
        seed: 11,
        ..TrainConfig::default()
    };
    let (a, ha) = train(&small_model(2), &windows, &windows[..8], &cfg).unwrap();
    let (b, hb) = train(&small_model(2), &windows, &windows[..8], &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
}

/// Overfit oracle: on a 64-window subset, training drives train RMSE below
/// the constant-mean-predictor RMSE.
#[test]
fn overfit_beats_constant_mean_predictor() {
    let windows = sample_windows(64, 13);
    let labels: Vec<f64> = windows.iter().map(|w| w.label_m).collect();
    let mean = labels.iter().sum::<f64>() / labels.len() as f64;
    let baseline_mse =
        labels.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / labels.len() as f64;

    // The default 5e-5 rate clears the baseline within a few epochs; larger
    // rates can collapse the softplus head.
    let cfg = TrainConfig {
        batch_size: 16,
        epochs: 12,
        seed: 4,
        ..TrainConfig::default()
    };
    let (_, history) = train(&small_model(6), &windows, &[], &cfg).unwrap();
    let final_mse = history.last().unwrap().train_loss;
    assert!(
        final_mse < baseline_mse,
        "train MSE {final_mse} did not beat constant-mean baseline {baseline_mse}"
    );
}

#[test]
fn fine_tune_freezes_conv_and_bn_bitwise() {
    let windows = sample_windows(20, 21);
    let base = small_model(9);
    let cfg = TrainConfig {
        learning_rate: 1e-3,
        batch_size: 10,
        epochs: 5,
        seed: 2,
        ..TrainConfig::default()
    };
    let tuned = fine_tune(&base, &windows, &cfg).unwrap();
    for (name, t) in &base.params {
        if name.starts_with("fc") {
            continue;
        }
        assert_eq!(t, tuned.param(name).unwrap(), "{name} changed during fine-tune");
    }
    // The FC layer did move.
    assert_ne!(base.param("fc1.weight"), tuned.param("fc1.weight"));
}

#[test]
fn empty_train_set_is_rejected() {
    let model = small_model(1);
    assert!(train(&model, &[], &[], &TrainConfig::default()).is_err());
}
