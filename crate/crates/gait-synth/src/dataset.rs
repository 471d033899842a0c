//! Whole-dataset generation: one profile per (subject, pattern), trials per
//! foot, per-trial seeds derived from manifest coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gait_core::{Foot, GaitType, ImuTrial, StrideAnnotation};

use crate::error::SynthError;
use crate::generator::{generate_trial, TrialParams};
use crate::profile::{sample_profile_for, Cohort, GaitProfile};
use crate::seed::mix;
use crate::sensor::{apply_sensor_model, SensorNoiseConfig};

fn gait_tag(gait: GaitType) -> u64 {
    match gait {
        GaitType::Normal => 1,
        GaitType::Shuffle => 2,
        GaitType::Stroke => 3,
    }
}

fn foot_tag(foot: Foot) -> u64 {
    match foot {
        Foot::Left => 1,
        Foot::Right => 2,
    }
}

/// One generated trial with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: ImuTrial,
    pub annotations: Vec<StrideAnnotation>,
}

/// Per-(subject, pattern) profile provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub profile_seed: u64,
    pub profile: GaitProfile,
}

/// Per-trial provenance; paths are filled by the exporter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: u32,
    pub gait_type: GaitType,
    pub foot: Foot,
    pub trial_index: u32,
    pub trial_seed: u64,
    pub noise_seed: u64,
    pub n_strides: usize,
    #[serde(default)]
    pub csv_path: Option<String>,
    #[serde(default)]
    pub annotation_path: Option<String>,
}

/// Everything needed to regenerate the dataset bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    pub sample_rate_hz: f64,
    pub cohort: Cohort,
    pub noise: SensorNoiseConfig,
    pub profiles: Vec<ProfileEntry>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub trials: Vec<TrialRecord>,
    pub manifest: Manifest,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }
}

/// Knobs for dataset generation beyond the spec-level call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub n_subjects: u32,
    pub trials_per_pattern: u32,
    pub sample_rate_hz: f64,
    pub noise: SensorNoiseConfig,
    pub cohort: Cohort,
    /// Inclusive per-trial stride-count ranges per pattern.
    pub strides_normal: (usize, usize),
    pub strides_shuffle: (usize, usize),
    pub strides_stroke: (usize, usize),
}

impl Default for DatasetParams {
    fn default() -> Self {
        DatasetParams {
            n_subjects: 10,
            trials_per_pattern: 6,
            sample_rate_hz: 200.0,
            noise: SensorNoiseConfig::default(),
            cohort: Cohort::Base,
            // Shuffling covers the same span with many more, shorter strides.
            strides_normal: (5, 7),
            strides_shuffle: (10, 14),
            strides_stroke: (8, 10),
        }
    }
}

impl DatasetParams {
    fn stride_range(&self, gait: GaitType) -> (usize, usize) {
        match gait {
            GaitType::Normal => self.strides_normal,
            GaitType::Shuffle => self.strides_shuffle,
            GaitType::Stroke => self.strides_stroke,
        }
    }
}

/// Generate with default parameters (200 Hz, base cohort).
pub fn generate_dataset(
    n_subjects: u32,
    trials_per_pattern: u32,
    noise: &SensorNoiseConfig,
    master_seed: u64,
) -> Result<Dataset, SynthError> {
    let params = DatasetParams {
        n_subjects,
        trials_per_pattern,
        noise: *noise,
        ..DatasetParams::default()
    };
    generate_dataset_with(&params, master_seed)
}

pub fn generate_dataset_with(
    params: &DatasetParams,
    master_seed: u64,
) -> Result<Dataset, SynthError> {
    if params.n_subjects < 2 {
        return Err(SynthError::InvalidArgument(format!(
            "need at least 2 subjects, got {}",
            params.n_subjects
        )));
    }
    if params.trials_per_pattern < 1 {
        return Err(SynthError::InvalidArgument(
            "trials_per_pattern must be at least 1".into(),
        ));
    }
    params.noise.validate()?;
    for (lo, hi) in [
        params.strides_normal,
        params.strides_shuffle,
        params.strides_stroke,
    ] {
        if lo < 1 || hi < lo {
            return Err(SynthError::InvalidArgument(format!(
                "invalid stride range ({lo}, {hi})"
            )));
        }
    }

    let mut profiles = Vec::new();
    let mut entries = Vec::new();
    let mut trials = Vec::new();

    for subject in 1..=params.n_subjects {
        for gait in GaitType::ALL {
            let profile_seed = mix(master_seed, &[subject as u64, gait_tag(gait), 0xF0]);
            let profile = sample_profile_for(params.cohort, gait, profile_seed);
            profiles.push(ProfileEntry {
                subject_id: subject,
                gait_type: gait,
                profile_seed,
                profile: profile.clone(),
            });

            for foot in Foot::BOTH {
                for t in 0..params.trials_per_pattern {
                    let coords = [
                        subject as u64,
                        gait_tag(gait),
                        foot_tag(foot),
                        t as u64,
                    ];
                    let trial_seed = mix(master_seed, &[coords[0], coords[1], coords[2], coords[3], 0x7A]);
                    let noise_seed = mix(trial_seed, &[0x4015E]);
                    let (lo, hi) = params.stride_range(gait);
                    let n_strides = ChaCha8Rng::seed_from_u64(mix(trial_seed, &[0x57]))
                        .random_range(lo..=hi);

                    let (ideal, annotations) = generate_trial(
                        &profile,
                        TrialParams {
                            subject_id: subject,
                            foot,
                            trial_index: t,
                        },
                        n_strides,
                        params.sample_rate_hz,
                        trial_seed,
                    )?;
                    let trial = apply_sensor_model(&ideal, &params.noise, noise_seed);

                    entries.push(ManifestEntry {
                        subject_id: subject,
                        gait_type: gait,
                        foot,
                        trial_index: t,
                        trial_seed,
                        noise_seed,
                        n_strides,
                        csv_path: None,
                        annotation_path: None,
                    });
                    trials.push(TrialRecord {
                        trial,
                        annotations,
                    });
                }
            }
        }
    }

    Ok(Dataset {
        trials,
        manifest: Manifest {
            master_seed,
            sample_rate_hz: params.sample_rate_hz,
            cohort: params.cohort,
            noise: params.noise,
            profiles,
            entries,
        },
    })
}

/// Regenerate a dataset from its manifest alone.
pub fn regenerate_from_manifest(manifest: &Manifest) -> Result<Dataset, SynthError> {
    let mut trials = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let profile = &manifest
            .profiles
            .iter()
            .find(|p| p.subject_id == entry.subject_id && p.gait_type == entry.gait_type)
            .ok_or_else(|| {
                SynthError::InvalidArgument(format!(
                    "manifest has no profile for subject {} gait {}",
                    entry.subject_id, entry.gait_type
                ))
            })?
            .profile;
        let (ideal, annotations) = generate_trial(
            profile,
            TrialParams {
                subject_id: entry.subject_id,
                foot: entry.foot,
                trial_index: entry.trial_index,
            },
            entry.n_strides,
            manifest.sample_rate_hz,
            entry.trial_seed,
        )?;
        let trial = apply_sensor_model(&ideal, &manifest.noise, entry.noise_seed);
        trials.push(TrialRecord { trial, annotations });
    }
    Ok(Dataset {
        trials,
        manifest: manifest.clone(),
    })
}
