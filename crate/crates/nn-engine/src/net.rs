//! Whole-network forward/backward orchestration and the MSE loss.

use crate::batch::Batch;
use crate::error::NnError;
use crate::layers::{
    bn_backward, bn_forward, conv_backward, conv_forward, dense_backward, dense_forward,
    leaky_relu_backward, leaky_relu_forward, maxpool_backward, maxpool_forward, softplus_backward,
    softplus_forward, Act, BnCache,
};
use crate::model::{layer_tensor_names, type_ordinals, Model};
use crate::spec::LayerSpec;
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Per-layer state kept for the backward pass.
pub enum LayerCache {
    Conv { input: Act },
    BatchNorm { cache: BnCache },
    LeakyRelu { mask: Vec<u8> },
    MaxPool { argmax: Vec<u8>, in_h: usize },
    Flatten { planes: usize, h: usize, w: usize },
    Dense { input: Act },
    Softplus { input: Act },
}

pub struct ForwardPass {
    pub predictions: Vec<f64>,
    pub caches: Vec<LayerCache>,
}

fn act_from_batch(model: &Model, batch: &Batch) -> Result<Act, NnError> {
    if batch.input_len != model.spec.input_len || batch.input_width != model.spec.input_width {
        return Err(NnError::BadBatch(format!(
            "batch is {}x{}, model expects {}x{}",
            batch.input_len, batch.input_width, model.spec.input_len, model.spec.input_width
        )));
    }
    Ok(Act {
        batch: batch.batch_size(),
        planes: 1,
        h: batch.input_len,
        w: batch.input_width,
        data: batch.data.clone(),
    })
}

/// Full forward pass, returning the caches needed for [`backward`].
///
/// In `Train` mode, BatchNorm layers of trainable layers use batch
/// statistics; frozen BatchNorm layers (and all layers in `Eval` mode) use
/// their running statistics. Running stats are never mutated here.
pub fn forward(model: &Model, batch: &Batch, mode: Mode) -> Result<ForwardPass, NnError> {
    let mut act = act_from_batch(model, batch)?;
    let ordinals = type_ordinals(&model.spec.layers);
    let mut caches = Vec::with_capacity(model.spec.layers.len());

    for (li, layer) in model.spec.layers.iter().enumerate() {
        let ord = ordinals[li];
        match *layer {
            LayerSpec::Conv {
                out_planes,
                kernel_h,
                ..
            } => {
                let w = model.param(&format!("conv{ord}.weight")).unwrap();
                let b = model.param(&format!("conv{ord}.bias")).unwrap();
                let out = conv_forward(&act, &w.data, &b.data, out_planes, kernel_h);
                caches.push(LayerCache::Conv { input: act });
                act = out;
            }
            LayerSpec::BatchNorm { .. } => {
                let gamma = model.param(&format!("bn{ord}.gamma")).unwrap();
                let beta = model.param(&format!("bn{ord}.beta")).unwrap();
                let rm = model.param(&format!("bn{ord}.running_mean")).unwrap();
                let rv = model.param(&format!("bn{ord}.running_var")).unwrap();
                let use_batch = mode == Mode::Train && model.layer_trainable[li];
                let (out, cache) =
                    bn_forward(&act, &gamma.data, &beta.data, &rm.data, &rv.data, use_batch);
                caches.push(LayerCache::BatchNorm { cache });
                act = out;
            }
            LayerSpec::LeakyRelu { slope } => {
                let (out, mask) = leaky_relu_forward(&act, slope);
                caches.push(LayerCache::LeakyRelu { mask });
                act = out;
            }
            LayerSpec::MaxPool { kernel_h } => {
                let in_h = act.h;
                let (out, argmax) = maxpool_forward(&act, kernel_h);
                caches.push(LayerCache::MaxPool { argmax, in_h });
                act = out;
            }
            LayerSpec::Flatten => {
                caches.push(LayerCache::Flatten {
                    planes: act.planes,
                    h: act.h,
                    w: act.w,
                });
                let len = act.sample_len();
                act = Act {
                    batch: act.batch,
                    planes: 1,
                    h: 1,
                    w: len,
                    data: act.data,
                };
            }
            LayerSpec::Dense { outputs, .. } => {
                let w = model.param(&format!("fc{ord}.weight")).unwrap();
                let b = model.param(&format!("fc{ord}.bias")).unwrap();
                let out = dense_forward(&act, &w.data, &b.data, outputs);
                caches.push(LayerCache::Dense { input: act });
                act = out;
            }
            LayerSpec::Softplus => {
                let out = softplus_forward(&act);
                caches.push(LayerCache::Softplus { input: act });
                act = out;
            }
        }
        debug_assert!(act.data.iter().all(|v| v.is_finite()), "layer {li} produced non-finite values");
    }

    if act.sample_len() != 1 {
        return Err(NnError::BadBatch(format!(
            "network output is {} values per sample, expected 1",
            act.sample_len()
        )));
    }
    Ok(ForwardPass {
        predictions: act.data,
        caches,
    })
}

/// Eval-mode predictions (running BN statistics), processed in chunks.
pub fn forward_eval(model: &Model, batch: &Batch) -> Result<Vec<f64>, NnError> {
    Ok(forward(model, batch, Mode::Eval)?.predictions)
}

/// MSE loss and its gradient w.r.t. the predictions.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(predictions.len(), targets.len());
    let n = predictions.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(predictions.len());
    for (p, t) in predictions.iter().zip(targets) {
        let e = p - t;
        loss += e * e;
        grad.push(2.0 * e / n);
    }
    (loss / n, grad)
}

/// Gradients of the loss w.r.t. every gradient-carrying parameter (conv and
/// dense weights/biases, BN gamma/beta), in parameter order. Freeze masks
/// are applied by the optimizer, not here.
pub fn backward(
    model: &Model,
    pass: &ForwardPass,
    d_predictions: &[f64],
) -> Result<Vec<(String, Tensor)>, NnError> {
    let ordinals = type_ordinals(&model.spec.layers);
    let batch = d_predictions.len();
    let mut d_act = Act {
        batch,
        planes: 1,
        h: 1,
        w: 1,
        data: d_predictions.to_vec(),
    };
    let mut grads: Vec<(String, Tensor)> = Vec::new();

    for (li, layer) in model.spec.layers.iter().enumerate().rev() {
        let ord = ordinals[li];
        match (*layer, &pass.caches[li]) {
            (
                LayerSpec::Conv {
                    in_planes,
                    out_planes,
                    kernel_h,
                },
                LayerCache::Conv { input },
            ) => {
                let w = model.param(&format!("conv{ord}.weight")).unwrap();
                let g = conv_backward(input, &d_act, &w.data, out_planes, kernel_h);
                grads.push((
                    format!("conv{ord}.weight"),
                    Tensor::from_vec(&[out_planes, in_planes, kernel_h], g.d_weight),
                ));
                grads.push((
                    format!("conv{ord}.bias"),
                    Tensor::from_vec(&[out_planes], g.d_bias),
                ));
                d_act = g.d_input;
            }
            (LayerSpec::BatchNorm { planes }, LayerCache::BatchNorm { cache }) => {
                let gamma = model.param(&format!("bn{ord}.gamma")).unwrap();
                let g = bn_backward(cache, &d_act, &gamma.data);
                grads.push((
                    format!("bn{ord}.gamma"),
                    Tensor::from_vec(&[planes], g.d_gamma),
                ));
                grads.push((
                    format!("bn{ord}.beta"),
                    Tensor::from_vec(&[planes], g.d_beta),
                ));
                d_act = g.d_input;
            }
            (LayerSpec::LeakyRelu { slope }, LayerCache::LeakyRelu { mask }) => {
                d_act = leaky_relu_backward(&d_act, mask, slope);
            }
            (LayerSpec::MaxPool { kernel_h }, LayerCache::MaxPool { argmax, in_h }) => {
                d_act = maxpool_backward(&d_act, argmax, *in_h, kernel_h);
            }
            (LayerSpec::Flatten, LayerCache::Flatten { planes, h, w }) => {
                d_act = Act {
                    batch: d_act.batch,
                    planes: *planes,
                    h: *h,
                    w: *w,
                    data: d_act.data,
                };
            }
            (LayerSpec::Dense { inputs, outputs }, LayerCache::Dense { input }) => {
                let w = model.param(&format!("fc{ord}.weight")).unwrap();
                let g = dense_backward(input, &d_act, &w.data, outputs);
                grads.push((
                    format!("fc{ord}.weight"),
                    Tensor::from_vec(&[outputs, inputs], g.d_weight),
                ));
                grads.push((
                    format!("fc{ord}.bias"),
                    Tensor::from_vec(&[outputs], g.d_bias),
                ));
                d_act = g.d_input;
            }
            (LayerSpec::Softplus, LayerCache::Softplus { input }) => {
                d_act = softplus_backward(input, &d_act);
            }
            _ => {
                return Err(NnError::Format(format!(
                    "cache/layer mismatch at layer {li}"
                )))
            }
        }
    }

    grads.reverse();
    Ok(grads)
}

/// Names of tensors that receive gradients (everything except BN buffers),
/// in parameter order.
pub fn gradient_tensor_names(model: &Model) -> Vec<String> {
    let ordinals = type_ordinals(&model.spec.layers);
    let mut out = Vec::new();
    for (layer, &ord) in model.spec.layers.iter().zip(&ordinals) {
        for (name, grad_carrying) in layer_tensor_names(ord, layer) {
            if grad_carrying {
                out.push(name);
            }
        }
    }
    out
}
