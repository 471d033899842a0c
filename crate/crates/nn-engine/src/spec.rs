//! Architecture description and shape inference.

use serde::{Deserialize, Serialize};

use crate::error::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LayerSpec {
    /// 2-D convolution with a `kernel_h x 1` kernel: convolves over time
    /// only, every width column shares the kernel.
    Conv {
        in_planes: usize,
        out_planes: usize,
        kernel_h: usize,
    },
    BatchNorm {
        planes: usize,
    },
    LeakyRelu {
        slope: f64,
    },
    /// `kernel_h x 1` max pooling over time, stride = kernel_h, floor.
    MaxPool {
        kernel_h: usize,
    },
    Flatten,
    Dense {
        inputs: usize,
        outputs: usize,
    },
    Softplus,
}

/// Activation shape flowing between layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActShape {
    pub planes: usize,
    pub h: usize,
    pub w: usize,
}

impl ActShape {
    pub fn len(&self) -> usize {
        self.planes * self.h * self.w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Input time steps (window length).
    pub input_len: usize,
    /// Input width (sensor channels).
    pub input_width: usize,
    pub layers: Vec<LayerSpec>,
}

/// The regressor's pinned kernel heights, in conv order.
pub const REGRESSOR_KERNELS: [usize; 3] = [2, 5, 5];

impl ModelSpec {
    /// The stride-length regressor: three Conv → BatchNorm → LeakyReLU →
    /// MaxPool blocks with kernels 2x1, 5x1, 5x1, then Flatten → Dense(1) →
    /// Softplus.
    pub fn regressor(input_len: usize, input_width: usize, filters: [usize; 3]) -> ModelSpec {
        let mut layers = Vec::new();
        let mut planes = 1usize;
        let mut h = input_len;
        for (i, &kh) in REGRESSOR_KERNELS.iter().enumerate() {
            layers.push(LayerSpec::Conv {
                in_planes: planes,
                out_planes: filters[i],
                kernel_h: kh,
            });
            planes = filters[i];
            h -= kh - 1;
            layers.push(LayerSpec::BatchNorm { planes });
            layers.push(LayerSpec::LeakyRelu { slope: 0.01 });
            layers.push(LayerSpec::MaxPool { kernel_h: 2 });
            h /= 2;
        }
        layers.push(LayerSpec::Flatten);
        layers.push(LayerSpec::Dense {
            inputs: planes * h * input_width,
            outputs: 1,
        });
        layers.push(LayerSpec::Softplus);
        ModelSpec {
            input_len,
            input_width,
            layers,
        }
    }

    /// Default regressor: 800x6 input, 16/32/64 filters.
    pub fn default_regressor() -> ModelSpec {
        ModelSpec::regressor(stride_seg::WINDOW_LEN, stride_seg::CHANNELS, [16, 32, 64])
    }

    /// Per-layer output shapes, checking chain consistency.
    pub fn shapes(&self) -> Result<Vec<ActShape>, NnError> {
        let mut shape = ActShape {
            planes: 1,
            h: self.input_len,
            w: self.input_width,
        };
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            shape = match *layer {
                LayerSpec::Conv {
                    in_planes,
                    out_planes,
                    kernel_h,
                } => {
                    if in_planes != shape.planes {
                        return Err(NnError::InvalidSpec(format!(
                            "layer {i}: conv expects {in_planes} planes, gets {}",
                            shape.planes
                        )));
                    }
                    if kernel_h == 0 || kernel_h > shape.h {
                        return Err(NnError::InvalidSpec(format!(
                            "layer {i}: kernel {kernel_h} does not fit height {}",
                            shape.h
                        )));
                    }
                    ActShape {
                        planes: out_planes,
                        h: shape.h - kernel_h + 1,
                        w: shape.w,
                    }
                }
                LayerSpec::BatchNorm { planes } => {
                    if planes != shape.planes {
                        return Err(NnError::InvalidSpec(format!(
                            "layer {i}: batchnorm over {planes} planes, gets {}",
                            shape.planes
                        )));
                    }
                    shape
                }
                LayerSpec::LeakyRelu { .. } | LayerSpec::Softplus => shape,
                LayerSpec::MaxPool { kernel_h } => {
                    if kernel_h == 0 || shape.h / kernel_h == 0 {
                        return Err(NnError::InvalidSpec(format!(
                            "layer {i}: pool kernel {kernel_h} too large for height {}",
                            shape.h
                        )));
                    }
                    ActShape {
                        planes: shape.planes,
                        h: shape.h / kernel_h,
                        w: shape.w,
                    }
                }
                LayerSpec::Flatten => ActShape {
                    planes: 1,
                    h: 1,
                    w: shape.len(),
                },
                LayerSpec::Dense { inputs, outputs } => {
                    if inputs != shape.len() {
                        return Err(NnError::InvalidSpec(format!(
                            "layer {i}: dense expects {inputs} inputs, gets {}",
                            shape.len()
                        )));
                    }
                    ActShape {
                        planes: 1,
                        h: 1,
                        w: outputs,
                    }
                }
            };
            out.push(shape);
        }
        Ok(out)
    }

    /// Chain consistency plus the regressor invariants: a three-conv spec
    /// must use the pinned 2/5/5 kernels and end in Softplus.
    pub fn validate(&self) -> Result<(), NnError> {
        let shapes = self.shapes()?;
        let final_shape = shapes.last().ok_or_else(|| {
            NnError::InvalidSpec("spec has no layers".into())
        })?;
        if final_shape.len() != 1 {
            return Err(NnError::InvalidSpec(format!(
                "regression output must be scalar, got {} values",
                final_shape.len()
            )));
        }
        let kernels: Vec<usize> = self
            .layers
            .iter()
            .filter_map(|l| match l {
                LayerSpec::Conv { kernel_h, .. } => Some(*kernel_h),
                _ => None,
            })
            .collect();
        if kernels.len() == 3 {
            if kernels != REGRESSOR_KERNELS {
                return Err(NnError::InvalidSpec(format!(
                    "three-conv regressor must use kernels {REGRESSOR_KERNELS:?}, got {kernels:?}"
                )));
            }
            if !matches!(self.layers.last(), Some(LayerSpec::Softplus)) {
                return Err(NnError::InvalidSpec(
                    "regressor must end in softplus".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_regressor_shape_chain() {
        let spec = ModelSpec::default_regressor();
        spec.validate().unwrap();
        let shapes = spec.shapes().unwrap();
        // 800 -> conv2: 799 -> pool: 399 -> conv5: 395 -> pool: 197
        //     -> conv5: 193 -> pool: 96
        let pool3 = shapes[11];
        assert_eq!((pool3.planes, pool3.h, pool3.w), (64, 96, 6));
        let last = *shapes.last().unwrap();
        assert_eq!(last.len(), 1);
    }

    #[test]
    fn wrong_kernels_are_rejected() {
        let mut spec = ModelSpec::default_regressor();
        if let LayerSpec::Conv { kernel_h, .. } = &mut spec.layers[0] {
            *kernel_h = 3;
        }
        assert!(spec.validate().is_err());
    }

    #[test]
    fn dense_size_mismatch_is_rejected() {
        let mut spec = ModelSpec::default_regressor();
        if let Some(LayerSpec::Dense { inputs, .. }) = spec
            .layers
            .iter_mut()
            .find(|l| matches!(l, LayerSpec::Dense { .. }))
        {
            *inputs += 1;
        }
        assert!(spec.validate().is_err());
    }
}
