//! Model serialization: one-line JSON header (version, spec, tensor table,
//! freeze mask) followed by a contiguous little-endian f64 payload.
//! Round-trips are bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::NnError;
use crate::model::{layer_tensor_names, layer_tensor_shapes, type_ordinals, Model};
use crate::spec::ModelSpec;
use crate::tensor::Tensor;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    spec: ModelSpec,
    tensors: Vec<TensorEntry>,
    layer_trainable: Vec<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

pub fn save_model(model: &Model, path: &Path) -> Result<(), NnError> {
    let header = Header {
        version: FORMAT_VERSION,
        spec: model.spec.clone(),
        tensors: model
            .params
            .iter()
            .map(|(name, t)| TensorEntry {
                name: name.clone(),
                shape: t.shape.clone(),
            })
            .collect(),
        layer_trainable: model.layer_trainable.clone(),
    };
    let mut bytes = serde_json::to_string(&header)?.into_bytes();
    bytes.push(b'\n');
    for (_, t) in &model.params {
        for v in &t.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| NnError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model, NnError> {
    let bytes = fs::read(path).map_err(|e| NnError::io(path, e))?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| NnError::Format("missing header line".into()))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])?;
    if header.version != FORMAT_VERSION {
        return Err(NnError::Format(format!(
            "unsupported format version {}",
            header.version
        )));
    }
    header.spec.validate()?;
    if header.layer_trainable.len() != header.spec.layers.len() {
        return Err(NnError::Format(
            "freeze mask length does not match layer count".into(),
        ));
    }

    // Cross-check the header's tensor table against the spec-derived
    // shapes; a corrupted header names the offending tensor.
    let ordinals = type_ordinals(&header.spec.layers);
    let mut expected: Vec<(String, Vec<usize>)> = Vec::new();
    for (layer, &ord) in header.spec.layers.iter().zip(&ordinals) {
        let names = layer_tensor_names(ord, layer);
        let shapes = layer_tensor_shapes(layer);
        for ((name, _), shape) in names.into_iter().zip(shapes) {
            expected.push((name, shape));
        }
    }
    if expected.len() != header.tensors.len() {
        return Err(NnError::Format(format!(
            "tensor table has {} entries, spec requires {}",
            header.tensors.len(),
            expected.len()
        )));
    }
    for (entry, (name, shape)) in header.tensors.iter().zip(&expected) {
        if &entry.name != name {
            return Err(NnError::Format(format!(
                "tensor table lists '{}' where spec requires '{name}'",
                entry.name
            )));
        }
        if &entry.shape != shape {
            return Err(NnError::ShapeMismatch {
                tensor: entry.name.clone(),
                expected: shape.clone(),
                got: entry.shape.clone(),
            });
        }
    }

    let payload = &bytes[newline + 1..];
    let total: usize = expected
        .iter()
        .map(|(_, s)| s.iter().product::<usize>())
        .sum();
    if payload.len() != total * 8 {
        return Err(NnError::Format(format!(
            "payload holds {} bytes, expected {} (no partial model loaded)",
            payload.len(),
            total * 8
        )));
    }

    let mut params = Vec::with_capacity(expected.len());
    let mut off = 0usize;
    for (name, shape) in expected {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for k in 0..len {
            let p = off + k * 8;
            data.push(f64::from_le_bytes(payload[p..p + 8].try_into().unwrap()));
        }
        off += len * 8;
        params.push((name, Tensor::from_vec(&shape, data)));
    }

    Ok(Model {
        spec: header.spec,
        params,
        layer_trainable: header.layer_trainable,
    })
}
