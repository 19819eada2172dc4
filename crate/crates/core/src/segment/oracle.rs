//! Brute-force reference segmentation: every pair of object pixels is tested
//! for the gap relation, components found by breadth-first search. Quadratic in the
//! number of object pixels; only meant for verifying [`super::segment`].

use std::collections::VecDeque;

use thiserror::Error;

use super::{finalize, Blob, SegmentationConfig};
use crate::classify::ClassMask;

/// 128 × 128.
pub const ORACLE_MAX_PIXELS: usize = 128 * 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("mask of {0} pixels exceeds the oracle cap of {ORACLE_MAX_PIXELS}")]
    TooLarge(usize),
}

pub fn segment_oracle(mask: &ClassMask, cfg: &SegmentationConfig) -> Result<Vec<Blob>, OracleError> {
    let total = mask.width() as usize * mask.height() as usize;
    if total > ORACLE_MAX_PIXELS {
        return Err(OracleError::TooLarge(total));
    }

    let mut pixels = Vec::new();
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let c = mask.get(x, y);
            if c.is_object() {
                pixels.push((x, y, c));
            }
        }
    }

    let n = pixels.len();
    let linked = |i: usize, j: usize| {
        let (xi, yi, ci) = pixels[i];
        let (xj, yj, cj) = pixels[j];
        ci == cj && xi.abs_diff(xj).max(yi.abs_diff(yj)) <= cfg.gap_px
    };

    // visiting seeds in raster order yields blobs in first-pixel order
    let mut seen = vec![false; n];
    let mut blobs = Vec::new();
    for seed in 0..n {
        if seen[seed] {
            continue;
        }
        seen[seed] = true;
        let (x, y, c) = pixels[seed];
        let mut blob = Blob::single(c, x, y);
        let mut queue = VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && linked(i, j) {
                    seen[j] = true;
                    let (x, y, c) = pixels[j];
                    blob.absorb(&Blob::single(c, x, y));
                    queue.push_back(j);
                }
            }
        }
        blobs.push(blob);
    }
    Ok(finalize(blobs, cfg.min_area_px))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ColorClass;

    #[test]
    fn empty_mask() {
        let mask = ClassMask::filled(5, 5, ColorClass::Unclassified);
        assert_eq!(segment_oracle(&mask, &SegmentationConfig::default()), Ok(vec![]));
    }

    #[test]
    fn single_pixel_blob() {
        let mut mask = ClassMask::filled(5, 5, ColorClass::Background);
        mask.set(2, 3, ColorClass::Blue);
        let cfg = SegmentationConfig {
            gap_px: 10,
            min_area_px: 1,
        };
        let blobs = segment_oracle(&mask, &cfg).unwrap();
        assert_eq!(blobs.len(), 1);
        let b = blobs[0];
        assert_eq!(b.pixel_count, 1);
        assert_eq!((b.min_x, b.min_y, b.max_x, b.max_y), (2, 3, 2, 3));
    }

    #[test]
    fn size_cap() {
        let mask = ClassMask::filled(129, 128, ColorClass::Background);
        assert_eq!(
            segment_oracle(&mask, &SegmentationConfig::default()),
            Err(OracleError::TooLarge(129 * 128))
        );
        let mask = ClassMask::filled(128, 128, ColorClass::Background);
        assert!(segment_oracle(&mask, &SegmentationConfig::default()).is_ok());
    }
}
