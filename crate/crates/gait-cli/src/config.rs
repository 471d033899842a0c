//! Experiment configuration: flat `key = value` text with `[section]`
//! headers, every run parameter in one diff-friendly file.
//!
//! Grammar (documented for the README):
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | entry
//! comment  := '#' .*
//! section  := '[' name ']'
//! entry    := key '=' value          # whitespace around both is trimmed
//! ```
//!
//! Keys are `section.key`; unknown keys are rejected so typos cannot
//! silently fall back to defaults. CLI flags override config keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gait_synth::{Cohort, DatasetParams, SensorNoiseConfig};
use nn_engine::TrainConfig;
use zupt_nav::ZuptConfig;

/// Everything a run needs, gathered from defaults, config file, and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Master seed: all per-trial and per-stage seeds derive from it.
    pub seed: u64,
    pub out_dir: PathBuf,

    // [dataset]
    pub subjects: u32,
    pub trials_per_pattern: u32,
    pub sample_rate_hz: f64,
    pub strides_normal: (usize, usize),
    pub strides_shuffle: (usize, usize),
    pub strides_stroke: (usize, usize),
    pub noise: SensorNoiseConfig,

    // [split]
    pub held_out_subjects: Vec<u32>,

    // [zupt]
    pub zupt: ZuptConfig,

    // [train]
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub bn_momentum: f64,
    pub filters: [usize; 3],

    // [transfer]
    pub transfer_subjects: u32,
    pub transfer_trials_per_pattern: u32,
    pub transfer_support_windows: usize,
    pub transfer_epochs: usize,
    pub transfer_learning_rate: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 2024,
            out_dir: PathBuf::from("out"),
            subjects: 10,
            trials_per_pattern: 2,
            sample_rate_hz: 200.0,
            strides_normal: (5, 7),
            strides_shuffle: (10, 14),
            strides_stroke: (8, 10),
            noise: SensorNoiseConfig::default(),
            held_out_subjects: vec![10],
            zupt: ZuptConfig::default(),
            learning_rate: 5e-5,
            batch_size: 64,
            epochs: 30,
            bn_momentum: 0.1,
            filters: [16, 32, 64],
            transfer_subjects: 4,
            transfer_trials_per_pattern: 6,
            transfer_support_windows: 20,
            transfer_epochs: 150,
            transfer_learning_rate: 2e-4,
        }
    }
}

impl ExperimentConfig {
    pub fn dataset_params(&self) -> DatasetParams {
        DatasetParams {
            n_subjects: self.subjects,
            trials_per_pattern: self.trials_per_pattern,
            sample_rate_hz: self.sample_rate_hz,
            noise: self.noise,
            cohort: Cohort::Base,
            strides_normal: self.strides_normal,
            strides_shuffle: self.strides_shuffle,
            strides_stroke: self.strides_stroke,
        }
    }

    pub fn transfer_dataset_params(&self) -> DatasetParams {
        DatasetParams {
            n_subjects: self.transfer_subjects,
            trials_per_pattern: self.transfer_trials_per_pattern,
            cohort: Cohort::Elderly,
            ..self.dataset_params()
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed,
            bn_momentum: self.bn_momentum,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.subjects < 2 {
            bail!("dataset.subjects must be at least 2, got {}", self.subjects);
        }
        for &s in &self.held_out_subjects {
            if s == 0 || s > self.subjects {
                bail!(
                    "split.held_out_subjects contains {s}, outside 1..={}",
                    self.subjects
                );
            }
        }
        if self.held_out_subjects.is_empty() {
            bail!("split.held_out_subjects must name at least one subject");
        }
        if self.held_out_subjects.len() as u32 >= self.subjects {
            bail!("holding out every subject leaves nothing to train on");
        }
        Ok(())
    }

    /// Parse a config file and fold it over the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_entries(&parse_entries(&text, path)?)?;
        Ok(cfg)
    }

    fn apply_entries(&mut self, entries: &BTreeMap<String, String>) -> Result<()> {
        for (key, value) in entries {
            self.apply_one(key, value)
                .with_context(|| format!("config key '{key}' = '{value}'"))?;
        }
        Ok(())
    }

    /// Apply one `section.key = value` override.
    pub fn apply_one(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| anyhow::anyhow!("{e}"))
        }
        fn pair(v: &str) -> Result<(usize, usize)> {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                bail!("expected 'lo,hi'");
            }
            Ok((num(parts[0])?, num(parts[1])?))
        }

        match key {
            "seed" => self.seed = num(value)?,
            "output.dir" => self.out_dir = PathBuf::from(value),

            "dataset.subjects" => self.subjects = num(value)?,
            "dataset.trials_per_pattern" => self.trials_per_pattern = num(value)?,
            "dataset.sample_rate_hz" => self.sample_rate_hz = num(value)?,
            "dataset.strides_normal" => self.strides_normal = pair(value)?,
            "dataset.strides_shuffle" => self.strides_shuffle = pair(value)?,
            "dataset.strides_stroke" => self.strides_stroke = pair(value)?,
            "dataset.accel_noise_std" => self.noise.accel_noise_std = num(value)?,
            "dataset.gyro_noise_std" => self.noise.gyro_noise_std = num(value)?,
            "dataset.accel_bias_walk_std" => self.noise.accel_bias_walk_std = num(value)?,
            "dataset.gyro_bias_walk_std" => self.noise.gyro_bias_walk_std = num(value)?,
            "dataset.accel_initial_bias" => self.noise.accel_initial_bias = num(value)?,
            "dataset.gyro_initial_bias" => self.noise.gyro_initial_bias = num(value)?,
            "dataset.mount_misalignment_deg" => self.noise.mount_misalignment_deg = num(value)?,

            "split.held_out_subjects" => {
                self.held_out_subjects = value
                    .split(',')
                    .map(|s| num::<u32>(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
            }

            "zupt.window_len" => self.zupt.window_len = num(value)?,
            "zupt.gamma" => self.zupt.gamma = num(value)?,
            "zupt.sigma_a" => self.zupt.sigma_a = num(value)?,
            "zupt.sigma_g" => self.zupt.sigma_g = num(value)?,
            "zupt.min_stance_samples" => self.zupt.min_stance_samples = num(value)?,
            "zupt.min_swing_samples" => self.zupt.min_swing_samples = num(value)?,

            "train.learning_rate" => self.learning_rate = num(value)?,
            "train.batch_size" => self.batch_size = num(value)?,
            "train.epochs" => self.epochs = num(value)?,
            "train.bn_momentum" => self.bn_momentum = num(value)?,
            "train.filters" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    bail!("expected 'c1,c2,c3'");
                }
                self.filters = [num(parts[0])?, num(parts[1])?, num(parts[2])?];
            }

            "transfer.subjects" => self.transfer_subjects = num(value)?,
            "transfer.trials_per_pattern" => self.transfer_trials_per_pattern = num(value)?,
            "transfer.support_windows" => self.transfer_support_windows = num(value)?,
            "transfer.epochs" => self.transfer_epochs = num(value)?,
            "transfer.learning_rate" => self.transfer_learning_rate = num(value)?,

            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }
}

/// Parse the flat `key = value` grammar into `section.key` entries.
fn parse_entries(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{} line {line_no}: expected 'key = value', got '{raw}'",
                path.display()
            );
        };
        let full_key = if section.is_empty() {
            key.trim().to_string()
        } else {
            format!("{section}.{}", key.trim())
        };
        entries.insert(full_key, value.trim().to_string());
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_overrides_defaults() {
        let text = "\
# experiment
seed = 7

[dataset]
subjects = 4
strides_shuffle = 9, 11

[zupt]
gamma = 99.5

[split]
held_out_subjects = 3, 4
";
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, text).unwrap();
        let cfg = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.subjects, 4);
        assert_eq!(cfg.strides_shuffle, (9, 11));
        assert_eq!(cfg.zupt.gamma, 99.5);
        assert_eq!(cfg.held_out_subjects, vec![3, 4]);
        // Untouched keys keep their defaults.
        assert_eq!(cfg.batch_size, ExperimentConfig::default().batch_size);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "[dataset]\nsubject_count = 4\n").unwrap();
        assert!(ExperimentConfig::from_file(&path).is_err());
    }

    #[test]
    fn validation_catches_bad_split() {
        let mut cfg = ExperimentConfig::default();
        cfg.held_out_subjects = vec![11];
        assert!(cfg.validate().is_err());
        cfg.held_out_subjects = (1..=10).collect();
        assert!(cfg.validate().is_err());
    }
}
