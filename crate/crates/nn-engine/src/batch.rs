//! Input batches assembled from stride windows.

use stride_seg::{StrideWindow, CHANNELS};

use crate::error::NnError;

/// A batch of `B` inputs of `input_len x input_width` values (time-major)
/// plus regression targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub data: Vec<f64>,
    pub targets: Vec<f64>,
    pub input_len: usize,
    pub input_width: usize,
}

impl Batch {
    pub fn batch_size(&self) -> usize {
        self.targets.len()
    }

    pub fn from_windows(windows: &[&StrideWindow]) -> Result<Batch, NnError> {
        if windows.is_empty() {
            return Err(NnError::BadBatch("empty window batch".into()));
        }
        let input_len = windows[0].window_len();
        let mut data = Vec::with_capacity(windows.len() * input_len * CHANNELS);
        let mut targets = Vec::with_capacity(windows.len());
        for w in windows {
            if w.window_len() != input_len {
                return Err(NnError::BadBatch("mixed window lengths in batch".into()));
            }
            data.extend_from_slice(&w.data);
            targets.push(w.label_m);
        }
        Ok(Batch {
            data,
            targets,
            input_len,
            input_width: CHANNELS,
        })
    }

    pub fn from_raw(
        data: Vec<f64>,
        targets: Vec<f64>,
        input_len: usize,
        input_width: usize,
    ) -> Result<Batch, NnError> {
        if targets.is_empty() || data.len() != targets.len() * input_len * input_width {
            return Err(NnError::BadBatch(format!(
                "data length {} does not match {} targets of {}x{}",
                data.len(),
                targets.len(),
                input_len,
                input_width
            )));
        }
        Ok(Batch {
            data,
            targets,
            input_len,
            input_width,
        })
    }
}
