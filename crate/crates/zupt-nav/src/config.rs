use serde::{Deserialize, Serialize};

use crate::error::ZuptError;

/// Stance-detector and cleanup parameters.
///
/// Defaults are tuned on clean synthetic trials; pipelines running on noisy
/// data should set `sigma_a`/`sigma_g` near the actual sensor noise and
/// raise `gamma` accordingly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZuptConfig {
    /// Detector window length, samples.
    pub window_len: usize,
    /// Detection threshold on the windowed statistic (dimensionless).
    pub gamma: f64,
    /// Assumed accelerometer noise STD for the statistic, m/s².
    pub sigma_a: f64,
    /// Assumed gyroscope noise STD for the statistic, rad/s.
    pub sigma_g: f64,
    /// Stance runs shorter than this are dropped.
    pub min_stance_samples: usize,
    /// Swing gaps shorter than this are filled.
    pub min_swing_samples: usize,
}

impl Default for ZuptConfig {
    fn default() -> Self {
        ZuptConfig {
            window_len: 3,
            gamma: 150.0,
            sigma_a: 0.1,
            sigma_g: 0.01,
            min_stance_samples: 25,
            min_swing_samples: 15,
        }
    }
}

impl ZuptConfig {
    pub fn validate(&self) -> Result<(), ZuptError> {
        if self.window_len < 1 {
            return Err(ZuptError::InvalidConfig("window_len must be >= 1".into()));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ZuptError::InvalidConfig(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.sigma_a > 0.0 && self.sigma_g > 0.0) {
            return Err(ZuptError::InvalidConfig(
                "sigma_a and sigma_g must be positive".into(),
            ));
        }
        Ok(())
    }
}
