//! Plain-SGD training loop and FC-only fine-tuning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use stride_seg::StrideWindow;

use crate::batch::Batch;
use crate::error::NnError;
use crate::model::{type_ordinals, Model};
use crate::net::{backward, forward, LayerCache, Mode};
use crate::spec::LayerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Running-stat update weight: `running = (1-m) running + m batch`.
    pub bn_momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 5e-5,
            batch_size: 64,
            epochs: 50,
            seed: 0,
            bn_momentum: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(NnError::BadBatch(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size < 1 {
            return Err(NnError::BadBatch("batch_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.bn_momentum) {
            return Err(NnError::BadBatch("bn_momentum must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    /// NaN when no validation set was supplied.
    pub val_loss: f64,
}

fn apply_sgd(model: &mut Model, grads: &[(String, crate::tensor::Tensor)], lr: f64) {
    let frozen = model.frozen_tensor_names();
    for (name, grad) in grads {
        if frozen.iter().any(|f| f == name) {
            continue;
        }
        let param = model.param_mut(name).expect("gradient for unknown tensor");
        for (p, g) in param.data.iter_mut().zip(&grad.data) {
            *p -= lr * g;
        }
    }
}

/// Fold the batch statistics of this pass into the running stats of
/// trainable BatchNorm layers.
fn update_running_stats(model: &mut Model, caches: &[LayerCache], momentum: f64) {
    let ordinals = type_ordinals(&model.spec.layers);
    let layers = model.spec.layers.clone();
    for (li, layer) in layers.iter().enumerate() {
        if !matches!(layer, LayerSpec::BatchNorm { .. }) || !model.layer_trainable[li] {
            continue;
        }
        if let LayerCache::BatchNorm { cache } = &caches[li] {
            if !cache.used_batch_stats {
                continue;
            }
            let ord = ordinals[li];
            let rm = model.param_mut(&format!("bn{ord}.running_mean")).unwrap();
            for (r, &m) in rm.data.iter_mut().zip(&cache.mean) {
                *r = (1.0 - momentum) * *r + momentum * m;
            }
            let rv = model.param_mut(&format!("bn{ord}.running_var")).unwrap();
            for (r, &v) in rv.data.iter_mut().zip(&cache.var) {
                *r = (1.0 - momentum) * *r + momentum * v;
            }
        }
    }
}

/// Eval-mode MSE over a window set, in batches.
pub fn evaluate_loss(model: &Model, windows: &[StrideWindow], batch_size: usize) -> Result<f64, NnError> {
    if windows.is_empty() {
        return Ok(f64::NAN);
    }
    let mut total = 0.0;
    for chunk in windows.chunks(batch_size.max(1)) {
        let refs: Vec<&StrideWindow> = chunk.iter().collect();
        let batch = Batch::from_windows(&refs)?;
        let pass = forward(model, &batch, Mode::Eval)?;
        for (p, t) in pass.predictions.iter().zip(&batch.targets) {
            total += (p - t) * (p - t);
        }
    }
    Ok(total / windows.len() as f64)
}

/// Eval-mode predictions for a window set, in batches.
pub fn predict(model: &Model, windows: &[StrideWindow], batch_size: usize) -> Result<Vec<f64>, NnError> {
    let mut out = Vec::with_capacity(windows.len());
    for chunk in windows.chunks(batch_size.max(1)) {
        let refs: Vec<&StrideWindow> = chunk.iter().collect();
        let batch = Batch::from_windows(&refs)?;
        out.extend(forward(model, &batch, Mode::Eval)?.predictions);
    }
    Ok(out)
}

/// Mini-batch SGD with fixed-seed shuffling. Returns the trained model and
/// one loss entry per epoch.
pub fn train(
    model: &Model,
    train_windows: &[StrideWindow],
    val_windows: &[StrideWindow],
    cfg: &TrainConfig,
) -> Result<(Model, Vec<EpochStats>), NnError> {
    cfg.validate()?;
    if train_windows.is_empty() {
        return Err(NnError::EmptyTrainSet);
    }

    let mut model = model.clone();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut indices: Vec<usize> = (0..train_windows.len()).collect();

    for epoch in 0..cfg.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (epoch as u64).wrapping_mul(0x9E3779B97F4A7C15));
        indices.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for chunk in indices.chunks(cfg.batch_size) {
            let refs: Vec<&StrideWindow> = chunk.iter().map(|&i| &train_windows[i]).collect();
            let batch = Batch::from_windows(&refs)?;
            let pass = forward(&model, &batch, Mode::Train)?;
            let (loss, d_preds) = crate::net::mse_loss(&pass.predictions, &batch.targets);
            loss_sum += loss * chunk.len() as f64;

            let grads = backward(&model, &pass, &d_preds)?;
            apply_sgd(&mut model, &grads, cfg.learning_rate);
            update_running_stats(&mut model, &pass.caches, cfg.bn_momentum);
        }

        let train_loss = loss_sum / train_windows.len() as f64;
        let val_loss = evaluate_loss(&model, val_windows, cfg.batch_size)?;
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok((model, history))
}

/// Transfer-learning step: freeze conv and BatchNorm layers (BN then runs on
/// its running statistics) and train only the fully connected layers on the
/// support set.
pub fn fine_tune(
    model: &Model,
    support_windows: &[StrideWindow],
    cfg: &TrainConfig,
) -> Result<Model, NnError> {
    let mut frozen = model.clone();
    frozen.freeze_all_but_dense();
    let (tuned, _) = train(&frozen, support_windows, &[], cfg)?;
    Ok(tuned)
}

/// Write the per-epoch history as `epoch,train_loss,val_loss` CSV.
pub fn write_history_csv(history: &[EpochStats], path: &std::path::Path) -> Result<(), NnError> {
    let mut buf = String::from("epoch,train_loss,val_loss\n");
    for h in history {
        let val = if h.val_loss.is_nan() {
            String::new()
        } else {
            format!("{}", h.val_loss)
        };
        buf.push_str(&format!("{},{},{}\n", h.epoch, h.train_loss, val));
    }
    std::fs::write(path, buf).map_err(|e| NnError::io(path, e))
}
