//! Central finite-difference verification of the analytic gradients.
//!
//! The loss is evaluated in training mode (batch statistics) with running
//! stats untouched, so the finite-difference loss is a deterministic pure
//! function of the parameters and the analytic backward must match it
//! through the batch-norm statistics as well.
//!
//! The loss is piecewise-smooth: max-pool argmax selections and leaky-ReLU
//! signs are discrete. When a ±eps stencil straddles such a kink the central
//! difference measures a chord across two smooth pieces, not a derivative,
//! so those components are detected (the discrete decisions of the +eps and
//! -eps passes are compared) and reported separately instead of being
//! scored. The check fails if too many components land on kinks.

use crate::batch::Batch;
use crate::error::NnError;
use crate::model::Model;
use crate::net::{backward, forward, gradient_tensor_names, mse_loss, LayerCache, Mode};

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// Largest relative error over components with a smooth stencil.
    pub max_rel_err: f64,
    pub worst_tensor: String,
    pub checked_components: usize,
    /// Components skipped because the stencil crossed a pool/ReLU kink.
    pub kink_components: usize,
}

/// FNV-1a over the discrete decisions (pool argmax, ReLU signs) of a pass.
fn discrete_signature(caches: &[LayerCache]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for c in caches {
        match c {
            LayerCache::MaxPool { argmax, .. } => eat(argmax),
            LayerCache::LeakyRelu { mask } => eat(mask),
            _ => {}
        }
    }
    h
}

fn loss_and_signature(model: &Model, batch: &Batch) -> Result<(f64, u64), NnError> {
    let pass = forward(model, batch, Mode::Train)?;
    let (loss, _) = mse_loss(&pass.predictions, &batch.targets);
    Ok((loss, discrete_signature(&pass.caches)))
}

/// Check analytic against central finite-difference gradients.
///
/// `per_tensor` limits how many components are probed per tensor (0 = all),
/// spread evenly across the tensor.
pub fn check_model_gradients(
    model: &Model,
    batch: &Batch,
    per_tensor: usize,
    eps: f64,
) -> Result<GradCheckReport, NnError> {
    let pass = forward(model, batch, Mode::Train)?;
    let (_, d_preds) = mse_loss(&pass.predictions, &batch.targets);
    let grads = backward(model, &pass, &d_preds)?;

    let names = gradient_tensor_names(model);
    let mut max_rel = 0.0f64;
    let mut worst = String::new();
    let mut checked = 0usize;
    let mut kinks = 0usize;

    for name in &names {
        let analytic = &grads
            .iter()
            .find(|(n, _)| n == name)
            .expect("missing gradient")
            .1;
        // Components with near-zero gradients are judged against the
        // tensor's gradient scale: a wrong backward term shows up at that
        // scale, while eps^2 truncation noise must not.
        let tensor_scale = analytic
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-6);
        let len = analytic.len();
        let indices: Vec<usize> = if per_tensor == 0 || len <= per_tensor {
            (0..len).collect()
        } else {
            (0..per_tensor).map(|i| i * len / per_tensor).collect()
        };

        for idx in indices {
            let mut plus = model.clone();
            plus.param_mut(name).unwrap().data[idx] += eps;
            let (lp, sig_p) = loss_and_signature(&plus, batch)?;

            let mut minus = model.clone();
            minus.param_mut(name).unwrap().data[idx] -= eps;
            let (lm, sig_m) = loss_and_signature(&minus, batch)?;

            if sig_p != sig_m {
                kinks += 1;
                continue;
            }

            let fd = (lp - lm) / (2.0 * eps);
            let an = analytic.data[idx];
            let rel = (fd - an).abs() / (fd.abs() + an.abs()).max(tensor_scale);
            checked += 1;
            if rel > max_rel {
                max_rel = rel;
                worst = format!("{name}[{idx}] fd={fd:.3e} analytic={an:.3e}");
            }
        }
    }

    Ok(GradCheckReport {
        max_rel_err: max_rel,
        worst_tensor: worst,
        checked_components: checked,
        kink_components: kinks,
    })
}
