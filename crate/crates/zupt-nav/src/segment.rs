//! ZUPT-based stride segmentation and stride-length extraction.

use crate::detector::for_each_run;
use crate::error::ZuptError;
use crate::reckon::NavSolution;

/// One stride per stance-to-stance span: `[stance_k start, stance_{k+1} start)`.
/// Fewer than two stance runs yield an empty list.
pub fn zupt_segment(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut starts = Vec::new();
    for_each_run(mask, |s, _, v| {
        if v {
            starts.push(s);
        }
    });
    starts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Horizontal (x, y) displacement norm over each interval.
pub fn zupt_stride_lengths(
    nav: &NavSolution,
    intervals: &[(usize, usize)],
) -> Result<Vec<f64>, ZuptError> {
    let n = nav.position.len();
    intervals
        .iter()
        .map(|&(start, end)| {
            if start >= end || end >= n {
                return Err(ZuptError::IntervalOutOfBounds {
                    start,
                    end,
                    len: n,
                });
            }
            let dx = nav.position[end][0] - nav.position[start][0];
            let dy = nav.position[end][1] - nav.position[start][1];
            Ok((dx * dx + dy * dy).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gait_core::math::Quat;

    fn nav_with_positions(pos: Vec<[f64; 3]>, mask: Vec<bool>) -> NavSolution {
        let n = pos.len();
        NavSolution {
            quaternions: vec![Quat::IDENTITY; n],
            world_accel: vec![[0.0; 3]; n],
            velocity: vec![[0.0; 3]; n],
            position: pos,
            stationary_mask: mask,
        }
    }

    #[test]
    fn three_stance_runs_give_two_strides() {
        let mut mask = vec![false; 100];
        mask[0..20].iter_mut().for_each(|m| *m = true);
        mask[40..60].iter_mut().for_each(|m| *m = true);
        mask[80..100].iter_mut().for_each(|m| *m = true);
        let intervals = zupt_segment(&mask);
        assert_eq!(intervals, vec![(0, 40), (40, 80)]);
    }

    #[test]
    fn fewer_than_two_runs_is_empty() {
        let mut mask = vec![false; 50];
        assert!(zupt_segment(&mask).is_empty());
        mask[0..50].iter_mut().for_each(|m| *m = true);
        assert!(zupt_segment(&mask).is_empty());
    }

    #[test]
    fn stationary_positions_give_zero_lengths() {
        let nav = nav_with_positions(vec![[0.0; 3]; 100], vec![true; 100]);
        let lengths = zupt_stride_lengths(&nav, &[(0, 50), (10, 99)]).unwrap();
        assert_eq!(lengths, vec![0.0, 0.0]);
    }

    #[test]
    fn horizontal_norm_ignores_vertical() {
        let mut pos = vec![[0.0; 3]; 10];
        pos[9] = [3.0, 4.0, 77.0];
        let nav = nav_with_positions(pos, vec![true; 10]);
        let lengths = zupt_stride_lengths(&nav, &[(0, 9)]).unwrap();
        assert!((lengths[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_interval_is_rejected() {
        let nav = nav_with_positions(vec![[0.0; 3]; 10], vec![true; 10]);
        assert!(matches!(
            zupt_stride_lengths(&nav, &[(0, 10)]),
            Err(ZuptError::IntervalOutOfBounds { .. })
        ));
        assert!(matches!(
            zupt_stride_lengths(&nav, &[(5, 5)]),
            Err(ZuptError::IntervalOutOfBounds { .. })
        ));
    }
}
