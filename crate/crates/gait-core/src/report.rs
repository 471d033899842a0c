//! Per-subject / per-pattern evaluation report assembly.
//!
//! Reports are always rebuilt from raw per-stride prediction records so
//! aggregate rows stay recomputable from the persisted pairs.

use serde::{Deserialize, Serialize};

use crate::error::GaitError;
use crate::metrics::{mae_mse, mean_std, rmse, tukey_outliers};
use crate::types::{Foot, GaitType};

/// One predicted stride paired with its ground truth, keyed by provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub trial_index: u32,
    pub stride_index: u32,
    pub truth_m: f64,
    pub pred_m: f64,
}

/// Error and distribution statistics for one group of prediction pairs.
///
/// Means/STDs are reported for ground truth and predictions separately;
/// `outlier_*` hold indices into the group's record order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    pub rmse_m: f64,
    pub mae_m: f64,
    pub mean_truth_m: f64,
    pub std_truth_m: f64,
    pub mean_pred_m: f64,
    pub std_pred_m: f64,
    pub stride_variance_m2: f64,
    pub outliers_pred: Vec<usize>,
    pub outliers_truth: Vec<usize>,
}

impl GroupStats {
    pub fn from_pairs(preds: &[f64], truths: &[f64]) -> Result<Self, GaitError> {
        let rmse_m = rmse(preds, truths)?;
        let (mae_m, _) = mae_mse(preds, truths)?;
        let (mean_truth_m, std_truth_m) = mean_std(truths)?;
        let (mean_pred_m, std_pred_m) = mean_std(preds)?;
        // Tukey needs at least 4 samples; small groups simply report none.
        let outliers_pred = tukey_outliers(preds).unwrap_or_default();
        let outliers_truth = tukey_outliers(truths).unwrap_or_default();
        Ok(GroupStats {
            n: preds.len(),
            rmse_m,
            mae_m,
            mean_truth_m,
            std_truth_m,
            mean_pred_m,
            std_pred_m,
            stride_variance_m2: std_truth_m * std_truth_m,
            outliers_pred,
            outliers_truth,
        })
    }
}

/// Stats for one (gait type, subject) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub gait_type: GaitType,
    pub subject_id: u32,
    pub stats: GroupStats,
}

/// Full evaluation report: per-cell rows plus per-gait and overall
/// aggregates, each recomputed from the raw pairs of its scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub per_gait: Vec<(GaitType, GroupStats)>,
    pub overall: GroupStats,
}

impl EvalReport {
    pub fn from_records(records: &[PredictionRecord]) -> Result<Self, GaitError> {
        if records.is_empty() {
            return Err(GaitError::EmptyInput("prediction records"));
        }

        let mut keys: Vec<(GaitType, u32)> = records
            .iter()
            .map(|r| (r.gait_type, r.subject_id))
            .collect();
        keys.sort();
        keys.dedup();

        let collect = |filter: &dyn Fn(&PredictionRecord) -> bool| -> (Vec<f64>, Vec<f64>) {
            let mut p = Vec::new();
            let mut t = Vec::new();
            for r in records.iter().filter(|r| filter(r)) {
                p.push(r.pred_m);
                t.push(r.truth_m);
            }
            (p, t)
        };

        let mut rows = Vec::with_capacity(keys.len());
        for (gait, subject) in keys {
            let (p, t) = collect(&|r| r.gait_type == gait && r.subject_id == subject);
            rows.push(EvalRow {
                gait_type: gait,
                subject_id: subject,
                stats: GroupStats::from_pairs(&p, &t)?,
            });
        }

        let mut per_gait = Vec::new();
        for gait in GaitType::ALL {
            let (p, t) = collect(&|r| r.gait_type == gait);
            if !p.is_empty() {
                per_gait.push((gait, GroupStats::from_pairs(&p, &t)?));
            }
        }

        let (p, t) = collect(&|_| true);
        let overall = GroupStats::from_pairs(&p, &t)?;

        Ok(EvalReport {
            rows,
            per_gait,
            overall,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(subject: u32, gait: GaitType, truth: f64, pred: f64) -> PredictionRecord {
        PredictionRecord {
            subject_id: subject,
            gait_type: gait,
            foot: Foot::Left,
            trial_index: 0,
            stride_index: 0,
            truth_m: truth,
            pred_m: pred,
        }
    }

    #[test]
    fn aggregates_recompute_from_raw_pairs() {
        let mut records = Vec::new();
        for s in 1..=3u32 {
            for (i, gait) in GaitType::ALL.iter().enumerate() {
                for k in 0..5 {
                    let truth = 0.5 + 0.1 * i as f64 + 0.01 * k as f64;
                    records.push(record(s, *gait, truth, truth + 0.02 * (s as f64)));
                }
            }
        }
        let report = EvalReport::from_records(&records).unwrap();
        assert_eq!(report.rows.len(), 9);

        // Overall RMSE recomputed straight from the records must match.
        let preds: Vec<f64> = records.iter().map(|r| r.pred_m).collect();
        let truths: Vec<f64> = records.iter().map(|r| r.truth_m).collect();
        let expect = rmse(&preds, &truths).unwrap();
        assert!((report.overall.rmse_m - expect).abs() < 1e-15);

        for row in &report.rows {
            assert!(row.stats.rmse_m >= row.stats.mae_m);
            assert!(row.stats.mae_m >= 0.0);
        }
    }

    #[test]
    fn empty_records_rejected() {
        assert!(EvalReport::from_records(&[]).is_err());
    }
}
