//! Experiment orchestration shared by the CLI commands and the acceptance
//! suite: dataset preparation, subject-ID splits, training, estimator
//! evaluation, the ZUPT-vs-CNN comparison and the transfer-learning run.

use anyhow::{bail, ensure, Context, Result};

use gait_core::{GaitType, PredictionRecord};
use gait_synth::{generate_dataset_with, seed::mix, Dataset};
use nn_engine::{fine_tune, train, EpochStats, Model, ModelSpec, TrainConfig};
use stride_seg::{apply_norm, fit_norm_stats, segment_ground_truth, NormStats, StrideWindow};

use crate::config::ExperimentConfig;
use crate::estimator::{CnnEstimator, StrideLengthEstimator, ZuptEstimator};
use crate::reports::TransferReport;

// Seed streams under the master seed.
const STREAM_MODEL_INIT: u64 = 0x11;
const STREAM_TRAIN: u64 = 0x12;
const STREAM_TRANSFER_DATA: u64 = 0x13;
const STREAM_TRANSFER_TUNE: u64 = 0x14;

pub fn build_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    Ok(generate_dataset_with(&cfg.dataset_params(), cfg.seed)?)
}

/// All ground-truth-segmented windows of a dataset, in manifest order.
pub fn all_windows(ds: &Dataset) -> Vec<StrideWindow> {
    let mut windows = Vec::new();
    for rec in &ds.trials {
        windows.extend(segment_ground_truth(&rec.trial, &rec.annotations));
    }
    windows
}

/// Split windows into (train, held-out) by subject ID.
pub fn split_by_subject(
    windows: Vec<StrideWindow>,
    held_out: &[u32],
) -> (Vec<StrideWindow>, Vec<StrideWindow>) {
    windows
        .into_iter()
        .partition(|w| !held_out.contains(&w.meta.subject_id))
}

pub struct TrainedArtifacts {
    pub model: Model,
    pub stats: NormStats,
    pub history: Vec<EpochStats>,
    pub train_count: usize,
    pub test_count: usize,
}

/// Train the regressor on everything but the held-out subjects.
/// Normalization statistics are fitted on the training split only.
pub fn train_model(cfg: &ExperimentConfig, ds: &Dataset) -> Result<TrainedArtifacts> {
    cfg.validate()?;
    let (train_raw, test_raw) = split_by_subject(all_windows(ds), &cfg.held_out_subjects);
    ensure!(!train_raw.is_empty(), "training split is empty");

    // Leave-one-subject-out contract: nothing of the held-out subjects may
    // touch the stats or the batches.
    for w in &train_raw {
        ensure!(
            !cfg.held_out_subjects.contains(&w.meta.subject_id),
            "held-out subject {} leaked into the training split",
            w.meta.subject_id
        );
    }

    let stats = fit_norm_stats(&train_raw)?;
    let train_windows: Vec<StrideWindow> = train_raw.iter().map(|w| apply_norm(w, &stats)).collect();
    let test_windows: Vec<StrideWindow> = test_raw.iter().map(|w| apply_norm(w, &stats)).collect();

    let spec = ModelSpec::regressor(stride_seg::WINDOW_LEN, stride_seg::CHANNELS, cfg.filters);
    let mut model = Model::init(spec, mix(cfg.seed, &[STREAM_MODEL_INIT]))?;

    // Start the regression head at the training-label mean so the softplus
    // output begins on the label scale.
    let mean_label = train_windows.iter().map(|w| w.label_m).sum::<f64>()
        / train_windows.len() as f64;
    if mean_label > 0.0 {
        let bias = model.param_mut("fc1.bias").expect("fc bias");
        bias.data[0] = (mean_label.exp() - 1.0).ln();
    }

    let train_cfg = cfg.train_config(mix(cfg.seed, &[STREAM_TRAIN]));
    let (model, history) = train(&model, &train_windows, &test_windows, &train_cfg)?;
    Ok(TrainedArtifacts {
        model,
        stats,
        history,
        train_count: train_windows.len(),
        test_count: test_windows.len(),
    })
}

/// Run one estimator over the annotated strides of the selected subjects
/// (all subjects when `subjects` is `None`).
pub fn evaluate_estimator(
    estimator: &dyn StrideLengthEstimator,
    ds: &Dataset,
    subjects: Option<&[u32]>,
) -> Result<Vec<PredictionRecord>> {
    let mut records = Vec::new();
    for rec in &ds.trials {
        if let Some(list) = subjects {
            if !list.contains(&rec.trial.subject_id) {
                continue;
            }
        }
        if rec.annotations.is_empty() {
            continue;
        }
        let preds = estimator
            .estimate(&rec.trial, &rec.annotations)
            .with_context(|| {
                format!(
                    "estimator {} on subject {} {} {} trial {}",
                    estimator.name(),
                    rec.trial.subject_id,
                    rec.trial.gait_type,
                    rec.trial.foot,
                    rec.trial.trial_index
                )
            })?;
        ensure!(preds.len() == rec.annotations.len(), "prediction count mismatch");
        for (k, (ann, pred)) in rec.annotations.iter().zip(&preds).enumerate() {
            records.push(PredictionRecord {
                subject_id: rec.trial.subject_id,
                gait_type: rec.trial.gait_type,
                foot: rec.trial.foot,
                trial_index: rec.trial.trial_index,
                stride_index: k as u32,
                truth_m: ann.stride_length_m,
                pred_m: *pred,
            });
        }
    }
    Ok(records)
}

/// How often ZUPT's own segmentation disagrees with the annotated stride
/// count (the "missed and overcounted steps" statistic; reported, never
/// asserted).
pub fn zupt_count_mismatch(
    cfg: &zupt_nav::ZuptConfig,
    ds: &Dataset,
    subjects: Option<&[u32]>,
) -> Result<(usize, usize)> {
    let mut mismatched = 0usize;
    let mut total = 0usize;
    for rec in &ds.trials {
        if let Some(list) = subjects {
            if !list.contains(&rec.trial.subject_id) {
                continue;
            }
        }
        let (_, intervals) = zupt_nav::run_pipeline(&rec.trial, cfg)?;
        total += 1;
        if intervals.len() != rec.annotations.len() {
            mismatched += 1;
        }
    }
    Ok((mismatched, total))
}

pub struct CompareOutcome {
    pub report: crate::reports::ComparisonReport,
    pub ml_records: Vec<PredictionRecord>,
    pub zupt_records: Vec<PredictionRecord>,
    /// (trials with stride-count disagreement, trials evaluated)
    pub count_mismatch: (usize, usize),
}

/// Evaluate both estimators on the identical held-out strides.
pub fn run_compare(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    artifacts: &TrainedArtifacts,
) -> Result<CompareOutcome> {
    let held_out = &cfg.held_out_subjects;
    let cnn = CnnEstimator {
        model: artifacts.model.clone(),
        stats: artifacts.stats.clone(),
    };
    let zupt = ZuptEstimator { cfg: cfg.zupt };

    let ml_records = evaluate_estimator(&cnn, ds, Some(held_out))?;
    let zupt_records = evaluate_estimator(&zupt, ds, Some(held_out))?;
    let report = crate::reports::comparison_report(&ml_records, &zupt_records)?;
    let count_mismatch = zupt_count_mismatch(&cfg.zupt, ds, Some(held_out))?;

    Ok(CompareOutcome {
        report,
        ml_records,
        zupt_records,
        count_mismatch,
    })
}

pub struct TransferOutcome {
    pub report: TransferReport,
    pub tuned_model: Model,
    /// Conv and BN tensors bitwise identical to the pretrained model.
    pub frozen_layers_unchanged: bool,
}

/// Domain-shift experiment: generate an elderly cohort, fine-tune only the
/// FC layer on a handful of support windows, evaluate frozen vs tuned on
/// the rest. `variant` varies the cohort and support draw per seed.
pub fn run_transfer(
    cfg: &ExperimentConfig,
    base_model: &Model,
    base_stats: &NormStats,
    variant: u64,
) -> Result<TransferOutcome> {
    let shifted = generate_dataset_with(
        &cfg.transfer_dataset_params(),
        mix(cfg.seed, &[STREAM_TRANSFER_DATA, variant]),
    )?;
    let raw = all_windows(&shifted);
    // Domain shift is the point: normalization stays the base cohort's.
    let windows: Vec<StrideWindow> = raw.iter().map(|w| apply_norm(w, base_stats)).collect();

    // Support selection: round-robin across subjects, a few labeled strides
    // per patient.
    let mut subjects: Vec<u32> = windows.iter().map(|w| w.meta.subject_id).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let per_subject: Vec<Vec<usize>> = subjects
        .iter()
        .map(|&s| {
            windows
                .iter()
                .enumerate()
                .filter(|(_, w)| w.meta.subject_id == s)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut support_idx = Vec::new();
    let mut round = 0usize;
    while support_idx.len() < cfg.transfer_support_windows {
        let mut advanced = false;
        for list in &per_subject {
            if let Some(&i) = list.get(round) {
                support_idx.push(i);
                advanced = true;
                if support_idx.len() == cfg.transfer_support_windows {
                    break;
                }
            }
        }
        if !advanced {
            break;
        }
        round += 1;
    }
    ensure!(
        support_idx.len() == cfg.transfer_support_windows,
        "shifted cohort too small for {} support windows",
        cfg.transfer_support_windows
    );

    let support: Vec<StrideWindow> = support_idx.iter().map(|&i| windows[i].clone()).collect();
    let eval: Vec<StrideWindow> = windows
        .iter()
        .enumerate()
        .filter(|(i, _)| !support_idx.contains(i))
        .map(|(_, w)| w.clone())
        .collect();
    if eval.is_empty() {
        bail!("no evaluation windows left after support selection");
    }

    let eval_truths: Vec<f64> = eval.iter().map(|w| w.label_m).collect();
    let frozen_preds = nn_engine::train::predict(base_model, &eval, cfg.batch_size)?;
    let frozen_rmse = gait_core::metrics::rmse(&frozen_preds, &eval_truths)?;

    let tune_cfg = TrainConfig {
        learning_rate: cfg.transfer_learning_rate,
        batch_size: cfg.transfer_support_windows.max(1),
        epochs: cfg.transfer_epochs,
        seed: mix(cfg.seed, &[STREAM_TRANSFER_TUNE, variant]),
        bn_momentum: cfg.bn_momentum,
    };
    let tuned = fine_tune(base_model, &support, &tune_cfg)?;

    let frozen_layers_unchanged = base_model
        .params
        .iter()
        .filter(|(n, _)| !n.starts_with("fc"))
        .all(|(n, t)| tuned.param(n) == Some(t));

    let tuned_preds = nn_engine::train::predict(&tuned, &eval, cfg.batch_size)?;
    let report = TransferReport::from_eval(
        &tuned_preds,
        &eval_truths,
        frozen_rmse,
        support.len(),
    )?;

    Ok(TransferOutcome {
        report,
        tuned_model: tuned,
        frozen_layers_unchanged,
    })
}
