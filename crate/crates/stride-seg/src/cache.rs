//! Binary window cache: per record `[label: f64 LE][window_len * CHANNELS
//! f64 LE, row-major time x channel]`, with a JSON sidecar manifest carrying
//! metadata. Bit-exact across platforms.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::SegError;
use crate::window::{StrideWindow, WindowMeta, CHANNELS};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    window_len: usize,
    channels: usize,
    count: usize,
    records: Vec<SidecarRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SidecarRecord {
    meta: WindowMeta,
    valid_len: usize,
}

fn sidecar_path(bin_path: &Path) -> std::path::PathBuf {
    bin_path.with_extension("json")
}

pub fn write_window_cache(windows: &[StrideWindow], bin_path: &Path) -> Result<(), SegError> {
    let window_len = windows.first().map_or(0, |w| w.window_len());
    let mut buf = Vec::with_capacity(windows.len() * (1 + window_len * CHANNELS) * 8);
    for w in windows {
        buf.extend_from_slice(&w.label_m.to_le_bytes());
        for v in &w.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(bin_path, buf).map_err(|e| SegError::io(bin_path, e))?;

    let sidecar = Sidecar {
        window_len,
        channels: CHANNELS,
        count: windows.len(),
        records: windows
            .iter()
            .map(|w| SidecarRecord {
                meta: w.meta,
                valid_len: w.valid_len,
            })
            .collect(),
    };
    let sc_path = sidecar_path(bin_path);
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| SegError::Json {
        path: sc_path.display().to_string(),
        source: e,
    })?;
    fs::write(&sc_path, json + "\n").map_err(|e| SegError::io(&sc_path, e))
}

pub fn read_window_cache(bin_path: &Path) -> Result<Vec<StrideWindow>, SegError> {
    let sc_path = sidecar_path(bin_path);
    let text = fs::read_to_string(&sc_path).map_err(|e| SegError::io(&sc_path, e))?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| SegError::Json {
        path: sc_path.display().to_string(),
        source: e,
    })?;
    if sidecar.channels != CHANNELS {
        return Err(SegError::CorruptCache(format!(
            "sidecar declares {} channels, expected {CHANNELS}",
            sidecar.channels
        )));
    }

    let bytes = fs::read(bin_path).map_err(|e| SegError::io(bin_path, e))?;
    let record_len = (1 + sidecar.window_len * CHANNELS) * 8;
    if bytes.len() != record_len * sidecar.count {
        return Err(SegError::CorruptCache(format!(
            "expected {} bytes for {} records, found {}",
            record_len * sidecar.count,
            sidecar.count,
            bytes.len()
        )));
    }
    if sidecar.records.len() != sidecar.count {
        return Err(SegError::CorruptCache(
            "sidecar record list does not match count".into(),
        ));
    }

    let mut windows = Vec::with_capacity(sidecar.count);
    for (i, rec) in sidecar.records.iter().enumerate() {
        let base = i * record_len;
        let label_m = f64::from_le_bytes(bytes[base..base + 8].try_into().unwrap());
        let mut data = Vec::with_capacity(sidecar.window_len * CHANNELS);
        for k in 0..sidecar.window_len * CHANNELS {
            let off = base + 8 + k * 8;
            data.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
        }
        windows.push(StrideWindow {
            data,
            label_m,
            valid_len: rec.valid_len,
            meta: rec.meta,
        });
    }
    Ok(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::{Foot, GaitType};

    fn sample_windows(n: usize) -> Vec<StrideWindow> {
        (0..n)
            .map(|i| StrideWindow {
                data: (0..crate::window::WINDOW_LEN * CHANNELS)
                    .map(|k| (i * 1000 + k) as f64 * 0.125)
                    .collect(),
                label_m: 0.5 + i as f64 * 0.001,
                valid_len: 200 + i,
                meta: WindowMeta {
                    subject_id: i as u32,
                    gait_type: GaitType::Shuffle,
                    foot: Foot::Right,
                    trial_index: 2,
                    stride_index: i as u32,
                },
            })
            .collect()
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let windows = sample_windows(3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.bin");
        write_window_cache(&windows, &path).unwrap();
        let back = read_window_cache(&path).unwrap();
        assert_eq!(windows, back);
    }

    #[test]
    fn truncated_cache_is_rejected() {
        let windows = sample_windows(2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.bin");
        write_window_cache(&windows, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 16]).unwrap();
        assert!(matches!(
            read_window_cache(&path),
            Err(SegError::CorruptCache(_))
        ));
    }
}
