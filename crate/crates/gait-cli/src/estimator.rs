//! Stride-length estimators behind a common trait, registered by name.
//!
//! Both the classical dead-reckoning baseline and the learned regressor
//! answer the same question — given a trial and its annotated strides, how
//! long was each stride — so evaluation code talks to `dyn
//! StrideLengthEstimator` and the concrete algorithm is selected at runtime
//! from the registry (`--estimator zupt|cnn`).

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use gait_core::{ImuTrial, StrideAnnotation};
use nn_engine::{load_model, Model};
use stride_seg::{apply_norm, segment_ground_truth, NormStats};
use zupt_nav::ZuptConfig;

pub trait StrideLengthEstimator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Predicted lengths for the annotated strides of one trial, one value
    /// per annotation, in order.
    fn estimate(&self, trial: &ImuTrial, annotations: &[StrideAnnotation]) -> Result<Vec<f64>>;
}

/// Classical baseline: ZUPT-corrected dead reckoning read out over the
/// annotated stride intervals, so both estimators score identical strides.
pub struct ZuptEstimator {
    pub cfg: ZuptConfig,
}

impl StrideLengthEstimator for ZuptEstimator {
    fn name(&self) -> &'static str {
        "zupt"
    }

    fn estimate(&self, trial: &ImuTrial, annotations: &[StrideAnnotation]) -> Result<Vec<f64>> {
        let (nav, _) = zupt_nav::run_pipeline(trial, &self.cfg)
            .with_context(|| format!("zupt pipeline on subject {}", trial.subject_id))?;
        let intervals: Vec<(usize, usize)> = annotations.iter().map(|a| a.interval()).collect();
        Ok(zupt_nav::zupt_stride_lengths(&nav, &intervals)?)
    }
}

/// Learned regressor over ground-truth-segmented 800x6 windows.
pub struct CnnEstimator {
    pub model: Model,
    pub stats: NormStats,
}

impl CnnEstimator {
    pub fn from_files(model_path: &Path, stats_path: &Path) -> Result<Self> {
        let model = load_model(model_path).map_err(|e| {
            anyhow!("{e}; train a model first with the `train` command")
        })?;
        let text = std::fs::read_to_string(stats_path)
            .with_context(|| format!("reading norm stats {}", stats_path.display()))?;
        let stats: NormStats = serde_json::from_str(&text)?;
        Ok(CnnEstimator { model, stats })
    }
}

impl StrideLengthEstimator for CnnEstimator {
    fn name(&self) -> &'static str {
        "cnn"
    }

    fn estimate(&self, trial: &ImuTrial, annotations: &[StrideAnnotation]) -> Result<Vec<f64>> {
        let windows = segment_ground_truth(trial, annotations);
        if windows.len() != annotations.len() {
            bail!(
                "{} of {} strides did not fit the window",
                annotations.len() - windows.len(),
                annotations.len()
            );
        }
        let normalized: Vec<_> = windows.iter().map(|w| apply_norm(w, &self.stats)).collect();
        Ok(nn_engine::train::predict(&self.model, &normalized, 64)?)
    }
}

/// Names the registry can build, in presentation order.
pub const ESTIMATOR_NAMES: [&str; 2] = ["zupt", "cnn"];

/// Everything an estimator constructor might need.
pub struct EstimatorContext<'a> {
    pub zupt: ZuptConfig,
    pub model_path: &'a Path,
    pub stats_path: &'a Path,
}

/// Build a registered estimator by name.
pub fn build_estimator(
    name: &str,
    ctx: &EstimatorContext<'_>,
) -> Result<Box<dyn StrideLengthEstimator>> {
    match name {
        "zupt" => Ok(Box::new(ZuptEstimator { cfg: ctx.zupt })),
        "cnn" => Ok(Box::new(CnnEstimator::from_files(
            ctx.model_path,
            ctx.stats_path,
        )?)),
        other => bail!(
            "unknown estimator '{other}'; registered: {}",
            ESTIMATOR_NAMES.join(", ")
        ),
    }
}
