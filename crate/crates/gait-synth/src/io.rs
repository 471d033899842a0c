//! Dataset file formats.
//!
//! - one CSV per trial, header `t,ax,ay,az,gx,gy,gz`, SI units, '.' decimal,
//!   LF line endings; floats printed shortest-round-trip so read-back is
//!   bit-exact;
//! - one JSON annotation file per trial;
//! - one manifest JSON listing paths and seeds.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gait_core::{Foot, GaitType, ImuSample, ImuTrial, StrideAnnotation};

use crate::dataset::{Dataset, Manifest, TrialRecord};
use crate::error::SynthError;

pub const TRIAL_CSV_HEADER: &str = "t,ax,ay,az,gx,gy,gz";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Serialized annotation sidecar for one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotationFile {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub sample_rate_hz: f64,
    pub strides: Vec<StrideEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrideEntry {
    pub hs: usize,
    pub to: usize,
    pub next_hs: usize,
    pub stride_length_m: f64,
    pub stance_time_s: f64,
    pub swing_time_s: f64,
}

pub fn write_trial_csv(trial: &ImuTrial, path: &Path) -> Result<(), SynthError> {
    let mut buf = String::with_capacity(trial.len() * 64);
    buf.push_str(TRIAL_CSV_HEADER);
    buf.push('\n');
    for s in &trial.samples {
        buf.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.t, s.accel[0], s.accel[1], s.accel[2], s.gyro[0], s.gyro[1], s.gyro[2]
        ));
    }
    fs::write(path, buf).map_err(|e| SynthError::io(path, e))
}

/// Read a trial CSV. Metadata not present in the file (subject, gait, foot)
/// defaults to zero values; the sample rate is inferred from the time column.
pub fn read_trial_csv(path: &Path) -> Result<ImuTrial, SynthError> {
    let text = fs::read_to_string(path).map_err(|e| SynthError::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| SynthError::Parse {
        path: path.display().to_string(),
        line: 1,
        message: "empty file".into(),
    })?;
    if header.trim() != TRIAL_CSV_HEADER {
        return Err(SynthError::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected header '{TRIAL_CSV_HEADER}', got '{header}'"),
        });
    }

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(SynthError::Parse {
                path: path.display().to_string(),
                line: line_no,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let mut vals = [0.0f64; 7];
        for (i, f) in fields.iter().enumerate() {
            vals[i] = f.trim().parse::<f64>().map_err(|e| SynthError::Parse {
                path: path.display().to_string(),
                line: line_no,
                message: format!("field {}: {e}", i + 1),
            })?;
        }
        samples.push(ImuSample {
            t: vals[0],
            accel: [vals[1], vals[2], vals[3]],
            gyro: [vals[4], vals[5], vals[6]],
        });
    }

    if samples.len() < 2 {
        return Err(SynthError::Parse {
            path: path.display().to_string(),
            line: samples.len() + 1,
            message: "need at least 2 samples".into(),
        });
    }
    let span = samples.last().unwrap().t - samples[0].t;
    let rate = (samples.len() - 1) as f64 / span;
    ImuTrial::new(samples, rate, 0, GaitType::Normal, Foot::Left, 0).map_err(|e| {
        SynthError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        }
    })
}

pub fn write_annotations_json(
    trial: &ImuTrial,
    annotations: &[StrideAnnotation],
    path: &Path,
) -> Result<(), SynthError> {
    let file = AnnotationFile {
        subject_id: trial.subject_id,
        gait_type: trial.gait_type,
        foot: trial.foot,
        sample_rate_hz: trial.sample_rate_hz,
        strides: annotations
            .iter()
            .map(|a| StrideEntry {
                hs: a.hs_index,
                to: a.to_index,
                next_hs: a.next_hs_index,
                stride_length_m: a.stride_length_m,
                stance_time_s: a.stance_time_s,
                swing_time_s: a.swing_time_s,
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&file).map_err(|e| SynthError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    fs::write(path, json + "\n").map_err(|e| SynthError::io(path, e))
}

pub fn read_annotations_json(path: &Path) -> Result<(AnnotationFile, Vec<StrideAnnotation>), SynthError> {
    let text = fs::read_to_string(path).map_err(|e| SynthError::io(path, e))?;
    let file: AnnotationFile = serde_json::from_str(&text).map_err(|e| SynthError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    let annotations = file
        .strides
        .iter()
        .map(|s| {
            StrideAnnotation::new(
                file.foot,
                s.hs,
                s.to,
                s.next_hs,
                s.stride_length_m,
                s.stance_time_s,
                s.swing_time_s,
                s.stance_time_s + s.swing_time_s,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((file, annotations))
}

fn trial_stem(rec: &TrialRecord) -> String {
    format!(
        "s{:02}_{}_{}_t{}",
        rec.trial.subject_id, rec.trial.gait_type, rec.trial.foot, rec.trial.trial_index
    )
}

/// Write every trial (CSV + annotation JSON) plus the manifest into `dir`.
/// Returns the manifest with file paths filled in.
pub fn export_dataset(dataset: &Dataset, dir: &Path) -> Result<Manifest, SynthError> {
    fs::create_dir_all(dir).map_err(|e| SynthError::io(dir, e))?;
    let mut manifest = dataset.manifest.clone();
    assert_eq!(manifest.entries.len(), dataset.trials.len());

    for (entry, rec) in manifest.entries.iter_mut().zip(&dataset.trials) {
        let stem = trial_stem(rec);
        let csv_name = format!("{stem}.csv");
        let ann_name = format!("{stem}.json");
        write_trial_csv(&rec.trial, &dir.join(&csv_name))?;
        write_annotations_json(&rec.trial, &rec.annotations, &dir.join(&ann_name))?;
        entry.csv_path = Some(csv_name);
        entry.annotation_path = Some(ann_name);
    }

    let manifest_path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| SynthError::Json {
        path: manifest_path.display().to_string(),
        source: e,
    })?;
    let mut f = fs::File::create(&manifest_path).map_err(|e| SynthError::io(&manifest_path, e))?;
    f.write_all(json.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| SynthError::io(&manifest_path, e))?;
    Ok(manifest)
}

/// Load a dataset previously written by [`export_dataset`].
pub fn load_dataset(dir: &Path) -> Result<Dataset, SynthError> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| SynthError::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| SynthError::Json {
        path: manifest_path.display().to_string(),
        source: e,
    })?;

    let mut trials = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let csv_rel: PathBuf = entry
            .csv_path
            .clone()
            .ok_or_else(|| SynthError::InvalidArgument("manifest entry missing csv_path".into()))?
            .into();
        let ann_rel: PathBuf = entry
            .annotation_path
            .clone()
            .ok_or_else(|| {
                SynthError::InvalidArgument("manifest entry missing annotation_path".into())
            })?
            .into();
        let bare = read_trial_csv(&dir.join(&csv_rel))?;
        let (meta, annotations) = read_annotations_json(&dir.join(&ann_rel))?;
        let trial = ImuTrial::new(
            bare.samples,
            meta.sample_rate_hz,
            meta.subject_id,
            meta.gait_type,
            meta.foot,
            entry.trial_index,
        )?;
        trials.push(TrialRecord { trial, annotations });
    }
    Ok(Dataset { trials, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_dataset;
    use crate::sensor::SensorNoiseConfig;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let ds = generate_dataset(2, 1, &SensorNoiseConfig::default(), 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trial.csv");
        write_trial_csv(&ds.trials[0].trial, &path).unwrap();
        let back = read_trial_csv(&path).unwrap();
        assert_eq!(back.samples, ds.trials[0].trial.samples);
    }

    #[test]
    fn header_mismatch_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "time,ax\n0,1\n").unwrap();
        match read_trial_csv(&path) {
            Err(SynthError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_field_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            format!("{TRIAL_CSV_HEADER}\n0,0,0,9.81,0,0,0\n0.005,zzz,0,9.81,0,0,0\n"),
        )
        .unwrap();
        match read_trial_csv(&path) {
            Err(SynthError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn export_then_load_round_trips() {
        let ds = generate_dataset(2, 1, &SensorNoiseConfig::default(), 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.len(), ds.len());
        for (a, b) in ds.trials.iter().zip(&back.trials) {
            assert_eq!(a.trial.samples, b.trial.samples);
            assert_eq!(a.trial.subject_id, b.trial.subject_id);
            assert_eq!(a.trial.gait_type, b.trial.gait_type);
            assert_eq!(a.annotations, b.annotations);
        }
    }

    #[test]
    fn export_is_reproducible_byte_for_byte() {
        let ds = generate_dataset(2, 1, &SensorNoiseConfig::default(), 3).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        export_dataset(&ds, d1.path()).unwrap();
        export_dataset(&ds, d2.path()).unwrap();
        let mut names: Vec<_> = std::fs::read_dir(d1.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let a = std::fs::read(d1.path().join(&name)).unwrap();
            let b = std::fs::read(d2.path().join(&name)).unwrap();
            assert_eq!(a, b, "file {name:?} differs");
        }
    }
}
