//! Model: spec + named parameter tensors + per-layer freeze mask.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::NnError;
use crate::spec::{LayerSpec, ModelSpec};
use crate::tensor::Tensor;

/// Parameter and buffer names follow `conv{k}.weight`, `bn{k}.gamma`,
/// `bn{k}.running_mean`, `fc{k}.weight`, numbered per layer type.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub spec: ModelSpec,
    /// Named tensors in deterministic layer order (parameters and BN
    /// running-stat buffers).
    pub params: Vec<(String, Tensor)>,
    /// One flag per layer; frozen layers receive no updates and frozen
    /// BatchNorm runs on its running statistics even in training mode.
    pub layer_trainable: Vec<bool>,
}

/// Names of the tensors a layer owns, in payload order. Running stats are
/// buffers, not gradient-carrying parameters.
pub fn layer_tensor_names(layer_idx_of_type: usize, layer: &LayerSpec) -> Vec<(String, bool)> {
    match layer {
        LayerSpec::Conv { .. } => vec![
            (format!("conv{layer_idx_of_type}.weight"), true),
            (format!("conv{layer_idx_of_type}.bias"), true),
        ],
        LayerSpec::BatchNorm { .. } => vec![
            (format!("bn{layer_idx_of_type}.gamma"), true),
            (format!("bn{layer_idx_of_type}.beta"), true),
            (format!("bn{layer_idx_of_type}.running_mean"), false),
            (format!("bn{layer_idx_of_type}.running_var"), false),
        ],
        LayerSpec::Dense { .. } => vec![
            (format!("fc{layer_idx_of_type}.weight"), true),
            (format!("fc{layer_idx_of_type}.bias"), true),
        ],
        _ => vec![],
    }
}

/// Expected tensor shapes per layer, in the same order as
/// [`layer_tensor_names`].
pub fn layer_tensor_shapes(layer: &LayerSpec) -> Vec<Vec<usize>> {
    match *layer {
        LayerSpec::Conv {
            in_planes,
            out_planes,
            kernel_h,
        } => vec![vec![out_planes, in_planes, kernel_h], vec![out_planes]],
        LayerSpec::BatchNorm { planes } => {
            vec![vec![planes], vec![planes], vec![planes], vec![planes]]
        }
        LayerSpec::Dense { inputs, outputs } => vec![vec![outputs, inputs], vec![outputs]],
        _ => vec![],
    }
}

/// Per-layer ordinal of its own type: conv1, conv2, ..., bn1, ..., fc1, ...
pub fn type_ordinals(layers: &[LayerSpec]) -> Vec<usize> {
    let mut conv = 0usize;
    let mut bn = 0usize;
    let mut fc = 0usize;
    layers
        .iter()
        .map(|l| match l {
            LayerSpec::Conv { .. } => {
                conv += 1;
                conv
            }
            LayerSpec::BatchNorm { .. } => {
                bn += 1;
                bn
            }
            LayerSpec::Dense { .. } => {
                fc += 1;
                fc
            }
            _ => 0,
        })
        .collect()
}

impl Model {
    /// Deterministic initialization: He-style normal conv/dense weights,
    /// zero biases, unit BN gamma, zero running means, unit running vars.
    pub fn init(spec: ModelSpec, seed: u64) -> Result<Model, NnError> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ordinals = type_ordinals(&spec.layers);
        let mut params = Vec::new();

        for (layer, &ord) in spec.layers.iter().zip(&ordinals) {
            let names = layer_tensor_names(ord, layer);
            let shapes = layer_tensor_shapes(layer);
            match *layer {
                LayerSpec::Conv {
                    in_planes,
                    kernel_h,
                    ..
                } => {
                    let std = (2.0 / (in_planes * kernel_h) as f64).sqrt();
                    let dist = Normal::new(0.0, std).unwrap();
                    let mut w = Tensor::zeros(&shapes[0]);
                    w.data.iter_mut().for_each(|v| *v = dist.sample(&mut rng));
                    params.push((names[0].0.clone(), w));
                    params.push((names[1].0.clone(), Tensor::zeros(&shapes[1])));
                }
                LayerSpec::BatchNorm { .. } => {
                    params.push((names[0].0.clone(), Tensor::filled(&shapes[0], 1.0)));
                    params.push((names[1].0.clone(), Tensor::zeros(&shapes[1])));
                    params.push((names[2].0.clone(), Tensor::zeros(&shapes[2])));
                    params.push((names[3].0.clone(), Tensor::filled(&shapes[3], 1.0)));
                }
                LayerSpec::Dense { inputs, .. } => {
                    let std = (2.0 / inputs as f64).sqrt();
                    let dist = Normal::new(0.0, std).unwrap();
                    let mut w = Tensor::zeros(&shapes[0]);
                    w.data.iter_mut().for_each(|v| *v = dist.sample(&mut rng));
                    params.push((names[0].0.clone(), w));
                    params.push((names[1].0.clone(), Tensor::zeros(&shapes[1])));
                }
                _ => {}
            }
        }

        let layer_trainable = vec![true; spec.layers.len()];
        Ok(Model {
            spec,
            params,
            layer_trainable,
        })
    }

    pub fn param(&self, name: &str) -> Option<&Tensor> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn param_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.params
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    /// Freeze everything except Dense layers (the transfer-learning setup).
    pub fn freeze_all_but_dense(&mut self) {
        for (i, layer) in self.spec.layers.iter().enumerate() {
            self.layer_trainable[i] = matches!(layer, LayerSpec::Dense { .. });
        }
    }

    /// Names of tensors belonging to frozen layers.
    pub fn frozen_tensor_names(&self) -> Vec<String> {
        let ordinals = type_ordinals(&self.spec.layers);
        let mut out = Vec::new();
        for ((layer, &ord), &trainable) in self
            .spec
            .layers
            .iter()
            .zip(&ordinals)
            .zip(&self.layer_trainable)
        {
            if !trainable {
                out.extend(layer_tensor_names(ord, layer).into_iter().map(|(n, _)| n));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ModelSpec;

    #[test]
    fn init_is_deterministic_and_complete() {
        let spec = ModelSpec::regressor(40, 6, [4, 6, 8]);
        let a = Model::init(spec.clone(), 7).unwrap();
        let b = Model::init(spec, 7).unwrap();
        assert_eq!(a, b);
        let names: Vec<&str> = a.params.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "conv1.weight",
                "conv1.bias",
                "bn1.gamma",
                "bn1.beta",
                "bn1.running_mean",
                "bn1.running_var",
                "conv2.weight",
                "conv2.bias",
                "bn2.gamma",
                "bn2.beta",
                "bn2.running_mean",
                "bn2.running_var",
                "conv3.weight",
                "conv3.bias",
                "bn3.gamma",
                "bn3.beta",
                "bn3.running_mean",
                "bn3.running_var",
                "fc1.weight",
                "fc1.bias",
            ]
        );
    }

    #[test]
    fn freeze_mask_targets_dense_only() {
        let mut m = Model::init(ModelSpec::regressor(40, 6, [4, 6, 8]), 1).unwrap();
        m.freeze_all_but_dense();
        let frozen = m.frozen_tensor_names();
        assert!(frozen.iter().any(|n| n == "conv1.weight"));
        assert!(frozen.iter().any(|n| n == "bn3.gamma"));
        assert!(!frozen.iter().any(|n| n.starts_with("fc")));
    }
}
