//! Evaluation metrics: RMSE/MAE/MSE, mean ± STD, Tukey outliers and
//! stride-to-stride variance.
//!
//! Population (1/N) estimators are used for standard deviation and variance
//! throughout so small per-trial groups stay well-defined. Quartiles use
//! linear interpolation between order statistics.

use crate::error::GaitError;

fn check_pair(predictions: &[f64], truths: &[f64]) -> Result<(), GaitError> {
    if predictions.len() != truths.len() {
        return Err(GaitError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(GaitError::EmptyInput("predictions/truths"));
    }
    if predictions.iter().chain(truths.iter()).any(|v| !v.is_finite()) {
        return Err(GaitError::NonFinite("predictions/truths"));
    }
    Ok(())
}

/// Root mean squared error between predictions and ground truth, meters.
pub fn rmse(predictions: &[f64], truths: &[f64]) -> Result<f64, GaitError> {
    let (_, mse) = mae_mse(predictions, truths)?;
    Ok(mse.sqrt())
}

/// Mean absolute error (m) and mean squared error (m²).
pub fn mae_mse(predictions: &[f64], truths: &[f64]) -> Result<(f64, f64), GaitError> {
    check_pair(predictions, truths)?;
    let n = predictions.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    for (p, t) in predictions.iter().zip(truths) {
        let e = p - t;
        abs_sum += e.abs();
        sq_sum += e * e;
    }
    Ok((abs_sum / n, sq_sum / n))
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64), GaitError> {
    if values.is_empty() {
        return Err(GaitError::EmptyInput("values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GaitError::NonFinite("values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Quantile by linear interpolation between order statistics of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// (Q1, median, Q3) by linear interpolation. Needs at least 4 values.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64), GaitError> {
    if values.len() < 4 {
        return Err(GaitError::TooFewValues {
            what: "quartiles",
            need: 4,
            got: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((
        quantile_sorted(&sorted, 0.25),
        quantile_sorted(&sorted, 0.5),
        quantile_sorted(&sorted, 0.75),
    ))
}

/// Tukey fences for a sample: `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`.
pub fn tukey_fences(values: &[f64]) -> Result<(f64, f64), GaitError> {
    if values.len() < 4 {
        return Err(GaitError::TooFewValues {
            what: "tukey fences",
            need: 4,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GaitError::NonFinite("values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok((q1 - 1.5 * iqr, q3 + 1.5 * iqr))
}

/// Indices of values outside the Tukey fences, ascending.
pub fn tukey_outliers(values: &[f64]) -> Result<Vec<usize>, GaitError> {
    let (lo, hi) = tukey_fences(values)?;
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < lo || v > hi)
        .map(|(i, _)| i)
        .collect())
}

/// Population variance of stride lengths within one trial/subject grouping.
pub fn stride_variance(stride_lengths: &[f64]) -> Result<f64, GaitError> {
    if stride_lengths.len() < 2 {
        return Err(GaitError::TooFewValues {
            what: "stride variance",
            need: 2,
            got: stride_lengths.len(),
        });
    }
    let (_, std) = mean_std(stride_lengths)?;
    Ok(std * std)
}
