//! Manual convergence probe (ignored by default; run with --ignored).

use gait_core::{Foot, GaitType};
use gait_synth::{generate_trial, sample_profile, TrialParams};
use nn_engine::{train, Model, ModelSpec, TrainConfig};
use stride_seg::{apply_norm, fit_norm_stats, segment_ground_truth, StrideWindow};

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

#[test]
#[ignore]
fn probe_convergence() {
    let windows = sample_windows(64, 13);
    let labels: Vec<f64> = windows.iter().map(|w| w.label_m).collect();
    let mean = labels.iter().sum::<f64>() / labels.len() as f64;
    let baseline = labels.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / labels.len() as f64;
    println!("baseline constant-mean MSE {baseline:.5}, label mean {mean:.3}");

    for lr in [5e-5, 5e-4, 2e-3, 1e-2] {
        let cfg = TrainConfig {
            learning_rate: lr,
            batch_size: 16,
            epochs: 30,
            seed: 4,
            ..TrainConfig::default()
        };
        let model = Model::init(ModelSpec::default_regressor(), 6).unwrap();
        let t0 = std::time::Instant::now();
        let (_, history) = train(&model, &windows, &[], &cfg).unwrap();
        let losses: Vec<String> = history
            .iter()
            .step_by(5)
            .map(|h| format!("{:.4}", h.train_loss))
            .collect();
        println!(
            "lr {lr:.0e}: {} (final {:.4}) [{:?}]",
            losses.join(" "),
            history.last().unwrap().train_loss,
            t0.elapsed()
        );
    }
}
