//! Windowing contracts over a whole generated dataset.

use gait_synth::{generate_dataset, SensorNoiseConfig};
use stride_seg::{discard_boundary, segment_ground_truth, CHANNELS, WINDOW_LEN};

#[test]
fn window_count_equals_annotation_count_dataset_wide() {
    let ds = generate_dataset(3, 2, &SensorNoiseConfig::default(), 44).unwrap();
    let mut total_annotations = 0usize;
    let mut windows = Vec::new();
    for rec in &ds.trials {
        total_annotations += rec.annotations.len();
        windows.extend(segment_ground_truth(&rec.trial, &rec.annotations));
    }
    // At 200 Hz no generated stride approaches 800 samples, so none skipped.
    assert_eq!(windows.len(), total_annotations);

    for w in &windows {
        assert_eq!(w.data.len(), WINDOW_LEN * CHANNELS);
        assert!(w.label_m >= 0.0);
        // Pad region is identically the pad vector.
        if w.valid_len < WINDOW_LEN {
            let pad: Vec<f64> = (0..CHANNELS).map(|c| w.channel(w.valid_len, c)).collect();
            for t in w.valid_len..WINDOW_LEN {
                for c in 0..CHANNELS {
                    assert_eq!(w.channel(t, c), pad[c]);
                }
            }
        }
    }
}

#[test]
fn discard_boundary_shrinks_per_trial_counts_by_two() {
    let ds = generate_dataset(2, 2, &SensorNoiseConfig::default(), 9).unwrap();
    let mut windows = Vec::new();
    let mut expected = 0usize;
    for rec in &ds.trials {
        let ws = segment_ground_truth(&rec.trial, &rec.annotations);
        expected += ws.len().saturating_sub(2);
        windows.extend(ws);
    }
    let kept = discard_boundary(&windows);
    assert_eq!(kept.len(), expected);

    // Surviving strides keep their relative order within each trial.
    let mut last_key = None;
    let mut last_stride = 0u32;
    for w in &kept {
        let key = (w.meta.subject_id, w.meta.gait_type, w.meta.foot, w.meta.trial_index);
        if Some(key) == last_key {
            assert!(w.meta.stride_index > last_stride);
        }
        last_key = Some(key);
        last_stride = w.meta.stride_index;
    }
}
