//! Report assembly and CSV emission.
//!
//! Every summary table is derived from persisted raw per-stride prediction
//! records, so reports can always be regenerated from disk. All writers are
//! deterministic: fixed row orders, fixed float formatting.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gait_core::metrics::{mean_std, quartiles, rmse, stride_variance, tukey_fences, tukey_outliers};
use gait_core::{Foot, GaitType, PredictionRecord};

// ------------------------------------------------------------ raw records

pub const RAW_PREDICTIONS_HEADER: &str =
    "subject_id,gait_type,foot,trial_index,stride_index,truth_m,pred_m";

pub fn write_raw_predictions(records: &[PredictionRecord], path: &Path) -> Result<()> {
    let mut buf = String::from(RAW_PREDICTIONS_HEADER);
    buf.push('\n');
    for r in records {
        writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            r.subject_id, r.gait_type, r.foot, r.trial_index, r.stride_index, r.truth_m, r.pred_m
        )?;
    }
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_raw_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RAW_PREDICTIONS_HEADER => {}
        other => bail!("bad raw prediction header: {other:?}"),
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            bail!("line {}: expected 7 fields", idx + 2);
        }
        records.push(PredictionRecord {
            subject_id: f[0].parse()?,
            gait_type: f[1].parse().map_err(|e: String| anyhow::anyhow!(e))?,
            foot: f[2].parse().map_err(|e: String| anyhow::anyhow!(e))?,
            trial_index: f[3].parse()?,
            stride_index: f[4].parse()?,
            truth_m: f[5].parse()?,
            pred_m: f[6].parse()?,
        });
    }
    Ok(records)
}

// ------------------------------------------------------ per-subject table

fn collect<'a>(
    records: &'a [PredictionRecord],
    pred: impl Fn(&PredictionRecord) -> bool + 'a,
) -> (Vec<f64>, Vec<f64>) {
    let mut p = Vec::new();
    let mut t = Vec::new();
    for r in records.iter().filter(|r| pred(r)) {
        p.push(r.pred_m);
        t.push(r.truth_m);
    }
    (p, t)
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or(String::new(), |v| format!("{v:.prec$}"))
}

/// Per-subject RMSE and truth mean ± STD per gait, plus an AVG row computed
/// over the pooled raw pairs.
pub fn write_per_subject_table(records: &[PredictionRecord], path: &Path) -> Result<()> {
    let mut subjects: Vec<u32> = records.iter().map(|r| r.subject_id).collect();
    subjects.sort_unstable();
    subjects.dedup();

    let mut buf = String::from(
        "subject_id,rmse_normal,rmse_shuffle,rmse_stroke,rmse_all,\
         mean_normal,std_normal,mean_shuffle,std_shuffle,mean_stroke,std_stroke\n",
    );

    let mut row = |label: String, filter: &dyn Fn(&PredictionRecord) -> bool| -> Result<String> {
        let mut cells = vec![label];
        for gait in GaitType::ALL {
            let (p, t) = collect(records, |r| filter(r) && r.gait_type == gait);
            cells.push(fmt_opt(
                (!p.is_empty()).then(|| rmse(&p, &t).unwrap()),
                4,
            ));
        }
        let (p, t) = collect(records, filter);
        cells.push(fmt_opt((!p.is_empty()).then(|| rmse(&p, &t).unwrap()), 4));
        for gait in GaitType::ALL {
            let (_, t) = collect(records, |r| filter(r) && r.gait_type == gait);
            if t.is_empty() {
                cells.push(String::new());
                cells.push(String::new());
            } else {
                let (m, s) = mean_std(&t).unwrap();
                cells.push(format!("{m:.4}"));
                cells.push(format!("{s:.4}"));
            }
        }
        // subject, 4 rmse, 6 mean/std -> reorder to header layout
        let (label, rest) = cells.split_first().unwrap();
        Ok(format!("{label},{}", rest.join(",")))
    };

    for s in &subjects {
        let line = row(s.to_string(), &|r| r.subject_id == *s)?;
        buf.push_str(&line);
        buf.push('\n');
    }
    let avg = row("AVG".into(), &|_| true)?;
    buf.push_str(&avg);
    buf.push('\n');
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

// ------------------------------------------------- boundary/outlier table

/// Stride boundaries and Tukey outlier counts per gait, before and after
/// the discard-first/last policy.
pub fn boundary_report_csv(
    all: &[PredictionRecord],
    discarded: &[PredictionRecord],
) -> Result<String> {
    let mut buf = String::from(
        "policy,gait_type,min_truth_m,max_truth_m,outliers_pred,outliers_truth,total_strides\n",
    );
    for (policy, records) in [("none", all), ("discard_first_last", discarded)] {
        for gait in GaitType::ALL {
            let (p, t) = collect(records, |r| r.gait_type == gait);
            if t.is_empty() {
                continue;
            }
            let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let out_p = tukey_outliers(&p).map(|v| v.len()).unwrap_or(0);
            let out_t = tukey_outliers(&t).map(|v| v.len()).unwrap_or(0);
            writeln!(
                buf,
                "{policy},{gait},{min:.4},{max:.4},{out_p},{out_t},{}",
                t.len()
            )?;
        }
    }
    Ok(buf)
}

// ----------------------------------------------------------- variance rows

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub trial_index: u32,
    pub variance_truth_m2: f64,
    pub variance_pred_m2: f64,
}

/// Per-trial stride-length variances of truth and predictions.
pub fn variance_rows(records: &[PredictionRecord]) -> Vec<VarianceRow> {
    let mut keys: Vec<(u32, GaitType, Foot, u32)> = records
        .iter()
        .map(|r| (r.subject_id, r.gait_type, r.foot, r.trial_index))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    let mut rows = Vec::new();
    for (s, g, f, t) in keys {
        let (p, tr) = collect(records, |r| {
            r.subject_id == s && r.gait_type == g && r.foot == f && r.trial_index == t
        });
        if p.len() < 2 {
            continue;
        }
        rows.push(VarianceRow {
            subject_id: s,
            gait_type: g,
            foot: f,
            trial_index: t,
            variance_truth_m2: stride_variance(&tr).unwrap(),
            variance_pred_m2: stride_variance(&p).unwrap(),
        });
    }
    rows
}

pub fn write_variance_csv(rows: &[VarianceRow], path: &Path) -> Result<()> {
    let mut buf =
        String::from("subject_id,gait_type,foot,trial_index,variance_truth_m2,variance_pred_m2\n");
    for r in rows {
        writeln!(
            buf,
            "{},{},{},{},{},{}",
            r.subject_id, r.gait_type, r.foot, r.trial_index, r.variance_truth_m2, r.variance_pred_m2
        )?;
    }
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Mean per-trial variance per gait over a variance table.
pub fn cohort_mean_variance(rows: &[VarianceRow], gait: GaitType, of_truth: bool) -> Option<f64> {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.gait_type == gait)
        .map(|r| {
            if of_truth {
                r.variance_truth_m2
            } else {
                r.variance_pred_m2
            }
        })
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

// ------------------------------------------------------------ boxplot rows

/// Quartile/fence/outlier summary per (gait, subject), for predictions and
/// ground truth separately.
pub fn write_boxplot_csv(records: &[PredictionRecord], path: &Path) -> Result<()> {
    let mut buf = String::from(
        "source,gait_type,subject_id,q1,median,q3,lo_fence,hi_fence,n_outliers,n\n",
    );
    let mut keys: Vec<(GaitType, u32)> = records
        .iter()
        .map(|r| (r.gait_type, r.subject_id))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    for source in ["pred", "truth"] {
        for &(gait, subject) in &keys {
            let (p, t) = collect(records, |r| {
                r.gait_type == gait && r.subject_id == subject
            });
            let vals = if source == "pred" { &p } else { &t };
            if vals.len() < 4 {
                continue;
            }
            let (q1, med, q3) = quartiles(vals)?;
            let (lo, hi) = tukey_fences(vals)?;
            let n_out = tukey_outliers(vals)?.len();
            writeln!(
                buf,
                "{source},{gait},{subject},{q1:.4},{med:.4},{q3:.4},{lo:.4},{hi:.4},{n_out},{}",
                vals.len()
            )?;
        }
    }
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

// --------------------------------------------------------- comparison table

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub gait_type: Option<GaitType>,
    pub ml_rmse_m: f64,
    pub zupt_rmse_m: f64,
    /// Mean ground-truth stride length of the scope, meters.
    pub mean_stride_m: f64,
    /// `100 (1 - ml/zupt)`, when zupt > 0.
    pub improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub per_gait: Vec<ComparisonRow>,
    pub overall: ComparisonRow,
    /// RMSE over Shuffle + Stroke strides pooled, the pathological scope.
    pub pathological_ml_rmse_m: f64,
    pub pathological_zupt_rmse_m: f64,
}

fn comparison_row(
    gait: Option<GaitType>,
    ml: &[PredictionRecord],
    zupt: &[PredictionRecord],
) -> Result<ComparisonRow> {
    let keep = |r: &&PredictionRecord| gait.is_none_or(|g| r.gait_type == g);
    let (mp, mt) = collect(ml, |r| keep(&r));
    let (zp, zt) = collect(zupt, |r| keep(&r));
    if mp.is_empty() || zp.is_empty() {
        bail!("no records for {gait:?}");
    }
    let ml_rmse = rmse(&mp, &mt)?;
    let zupt_rmse = rmse(&zp, &zt)?;
    let (mean, _) = mean_std(&mt)?;
    Ok(ComparisonRow {
        gait_type: gait,
        ml_rmse_m: ml_rmse,
        zupt_rmse_m: zupt_rmse,
        mean_stride_m: mean,
        improvement_pct: (zupt_rmse > 0.0).then(|| 100.0 * (1.0 - ml_rmse / zupt_rmse)),
    })
}

/// Build the Table-5-shaped report from the two estimators' records over
/// identical strides.
pub fn comparison_report(
    ml: &[PredictionRecord],
    zupt: &[PredictionRecord],
) -> Result<ComparisonReport> {
    if ml.len() != zupt.len() {
        bail!(
            "estimators scored different stride sets: {} vs {}",
            ml.len(),
            zupt.len()
        );
    }
    let mut per_gait = Vec::new();
    for gait in GaitType::ALL {
        per_gait.push(comparison_row(Some(gait), ml, zupt)?);
    }
    let overall = comparison_row(None, ml, zupt)?;

    let patho = |records: &[PredictionRecord]| -> Result<f64> {
        let (p, t) = collect(records, |r| r.gait_type != GaitType::Normal);
        Ok(rmse(&p, &t)?)
    };

    Ok(ComparisonReport {
        per_gait,
        overall,
        pathological_ml_rmse_m: patho(ml)?,
        pathological_zupt_rmse_m: patho(zupt)?,
    })
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut buf = String::from("gait_type,ml_rmse_m,zupt_rmse_m,mean_stride_m,improvement_pct\n");
    for row in report.per_gait.iter().chain([&report.overall]) {
        let label = row.gait_type.map_or("avg".to_string(), |g| g.to_string());
        let _ = writeln!(
            buf,
            "{label},{:.4},{:.4},{:.4},{}",
            row.ml_rmse_m,
            row.zupt_rmse_m,
            row.mean_stride_m,
            fmt_opt(row.improvement_pct, 1)
        );
    }
    let _ = writeln!(
        buf,
        "pathological,{:.4},{:.4},,{}",
        report.pathological_ml_rmse_m,
        report.pathological_zupt_rmse_m,
        fmt_opt(
            Some(100.0 * (1.0 - report.pathological_ml_rmse_m / report.pathological_zupt_rmse_m)),
            1
        )
    );
    buf
}

/// Human-readable rendering of the comparison for stdout.
pub fn comparison_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>10} {:>10} {:>8} {:>12}", "pattern", "cnn", "zupt", "mean", "improvement");
    for row in report.per_gait.iter().chain([&report.overall]) {
        let label = row.gait_type.map_or("avg".to_string(), |g| g.to_string());
        let _ = writeln!(
            out,
            "{label:<10} {:>10.4} {:>10.4} {:>8.3} {:>11}%",
            row.ml_rmse_m,
            row.zupt_rmse_m,
            row.mean_stride_m,
            fmt_opt(row.improvement_pct, 1)
        );
    }
    out
}

// ----------------------------------------------------------- transfer table

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub mean_pred_m: f64,
    pub mean_truth_m: f64,
    pub std_pred_m: f64,
    pub std_truth_m: f64,
    pub mae_m: f64,
    pub mse_m2: f64,
    pub rmse_m: f64,
    pub frozen_rmse_m: f64,
    pub support_count: usize,
    pub eval_count: usize,
}

impl TransferReport {
    pub fn from_eval(
        preds: &[f64],
        truths: &[f64],
        frozen_rmse_m: f64,
        support_count: usize,
    ) -> Result<Self> {
        let (mae, mse) = gait_core::metrics::mae_mse(preds, truths)?;
        let (mp, sp) = mean_std(preds)?;
        let (mt, st) = mean_std(truths)?;
        Ok(TransferReport {
            mean_pred_m: mp,
            mean_truth_m: mt,
            std_pred_m: sp,
            std_truth_m: st,
            mae_m: mae,
            mse_m2: mse,
            rmse_m: mse.sqrt(),
            frozen_rmse_m,
            support_count,
            eval_count: preds.len(),
        })
    }

    /// Table-2-shaped CSV: Mean/STD carry prediction and ground-truth
    /// columns; MAE/MSE/RMSE are single-valued.
    pub fn to_csv(&self) -> String {
        let mut buf = String::from("metric,predictions,ground_truth\n");
        let _ = writeln!(buf, "mean_m,{:.4},{:.4}", self.mean_pred_m, self.mean_truth_m);
        let _ = writeln!(buf, "std_m,{:.4},{:.4}", self.std_pred_m, self.std_truth_m);
        let _ = writeln!(buf, "mae_m,{:.4},", self.mae_m);
        let _ = writeln!(buf, "mse_m2,{:.4},", self.mse_m2);
        let _ = writeln!(buf, "rmse_m,{:.4},", self.rmse_m);
        let _ = writeln!(buf, "frozen_rmse_m,{:.4},", self.frozen_rmse_m);
        let _ = writeln!(buf, "support_count,{},", self.support_count);
        let _ = writeln!(buf, "eval_count,{},", self.eval_count);
        buf
    }
}
