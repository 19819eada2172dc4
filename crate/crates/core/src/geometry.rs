//! Centroids, extents, distances and pixel-to-millimetre calibration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::Blob;

/// Real-valued pixel coordinates; x grows rightward, y downward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CentroidPx {
    pub x: f64,
    pub y: f64,
}

impl CentroidPx {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Inclusive axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl BoundingBox {
    pub fn contains(&self, p: CentroidPx) -> bool {
        p.x >= self.min_x as f64
            && p.x <= self.max_x as f64
            && p.y >= self.min_y as f64
            && p.y <= self.max_y as f64
    }

    pub fn as_array(&self) -> [u32; 4] {
        [self.min_x, self.min_y, self.max_x, self.max_y]
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("calibration requires a positive finite mm_per_px, got {0}")]
    InvalidCalibration(f64),
    #[error("cannot convert negative length {0} px")]
    NegativeLength(f64),
}

/// Physical size of one pixel. The area is always the square of the side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    mm_per_px: f64,
    mm2_per_px: f64,
}

impl Default for Calibration {
    /// 1.5 mm per pixel side, 2.25 mm² per pixel.
    fn default() -> Self {
        Self {
            mm_per_px: 1.5,
            mm2_per_px: 2.25,
        }
    }
}

impl Calibration {
    pub fn new(mm_per_px: f64) -> Result<Self, GeometryError> {
        if !(mm_per_px.is_finite() && mm_per_px > 0.0) {
            return Err(GeometryError::InvalidCalibration(mm_per_px));
        }
        Ok(Self {
            mm_per_px,
            mm2_per_px: mm_per_px * mm_per_px,
        })
    }

    pub fn mm_per_px(&self) -> f64 {
        self.mm_per_px
    }

    pub fn mm2_per_px(&self) -> f64 {
        self.mm2_per_px
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizontal {
    Left,
    Right,
    Aligned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vertical {
    Above,
    Below,
    Aligned,
}

/// Where a target sits relative to a reference, in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelativePosition {
    pub horizontal: Horizontal,
    pub vertical: Vertical,
}

/// Mean pixel coordinate of a blob.
pub fn centroid(b: &Blob) -> CentroidPx {
    let n = b.pixel_count as f64;
    CentroidPx::new(b.sum_x as f64 / n, b.sum_y as f64 / n)
}

pub fn bbox(b: &Blob) -> BoundingBox {
    BoundingBox {
        min_x: b.min_x,
        min_y: b.min_y,
        max_x: b.max_x,
        max_y: b.max_y,
    }
}

/// Euclidean distance in pixels.
pub fn distance_px(a: CentroidPx, b: CentroidPx) -> f64 {
    (b.x - a.x).hypot(b.y - a.y)
}

pub fn px_to_mm(d: f64, cal: &Calibration) -> Result<f64, GeometryError> {
    if d < 0.0 {
        return Err(GeometryError::NegativeLength(d));
    }
    Ok(d * cal.mm_per_px)
}

pub fn area_mm2(pixel_count: u64, cal: &Calibration) -> f64 {
    pixel_count as f64 * cal.mm2_per_px
}

pub fn relative_position(reference: CentroidPx, target: CentroidPx) -> RelativePosition {
    use std::cmp::Ordering::*;
    let horizontal = match target.x.partial_cmp(&reference.x) {
        Some(Less) => Horizontal::Left,
        Some(Greater) => Horizontal::Right,
        _ => Horizontal::Aligned,
    };
    let vertical = match target.y.partial_cmp(&reference.y) {
        Some(Less) => Vertical::Above,
        Some(Greater) => Vertical::Below,
        _ => Vertical::Aligned,
    };
    RelativePosition {
        horizontal,
        vertical,
    }
}

/// Rounds half up (toward +inf) to an integer.
pub fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}

/// Rounds half up to one decimal place.
pub fn round_tenth(v: f64) -> f64 {
    (v * 10.0 + 0.5).floor() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ColorClass;
    use proptest::prelude::*;

    fn blob_from(pixels: &[(u32, u32)]) -> Blob {
        let mut b = Blob::single(ColorClass::Black, pixels[0].0, pixels[0].1);
        for &(x, y) in &pixels[1..] {
            b.absorb(&Blob::single(ColorClass::Black, x, y));
        }
        b
    }

    #[test]
    fn centroid_examples() {
        let square: Vec<_> = (20..=22).flat_map(|y| (10..=12).map(move |x| (x, y))).collect();
        assert_eq!(centroid(&blob_from(&square)), CentroidPx::new(11.0, 21.0));

        let l_shape = blob_from(&[(0, 0), (1, 0), (0, 1)]);
        let c = centroid(&l_shape);
        assert!((c.x - 1.0 / 3.0).abs() < 1e-12 && (c.y - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(bbox(&l_shape).as_array(), [0, 0, 1, 1]);

        let single = blob_from(&[(5, 7)]);
        assert_eq!(centroid(&single), CentroidPx::new(5.0, 7.0));
        assert_eq!(bbox(&single).as_array(), [5, 7, 5, 7]);
    }

    #[test]
    fn distance_examples() {
        let d = distance_px(CentroidPx::new(296.0, 453.0), CentroidPx::new(427.0, 415.0));
        assert!((d - 136.4).abs() < 0.05, "{d}");
        assert_eq!(round_half_up(d), 136.0);
        assert_eq!(distance_px(CentroidPx::new(0.0, 0.0), CentroidPx::new(3.0, 4.0)), 5.0);
        let p = CentroidPx::new(1.5, -2.0);
        assert_eq!(distance_px(p, p), 0.0);
    }

    #[test]
    fn unit_conversion() {
        let cal = Calibration::default();
        assert_eq!(px_to_mm(136.0, &cal).unwrap(), 204.0);
        assert_eq!(px_to_mm(142.0, &cal).unwrap(), 213.0);
        assert_eq!(px_to_mm(0.0, &cal).unwrap(), 0.0);
        assert!(matches!(px_to_mm(-1.0, &cal), Err(GeometryError::NegativeLength(_))));
        assert_eq!(area_mm2(1, &cal), 2.25);
        assert_eq!(area_mm2(1112, &cal), 2502.0);
        assert_eq!(area_mm2(0, &cal), 0.0);
        assert_eq!(Calibration::new(1.5).unwrap(), cal);
        assert!(Calibration::new(0.0).is_err());
        assert!(Calibration::new(f64::NAN).is_err());
    }

    #[test]
    fn relative_position_examples() {
        let r = relative_position(CentroidPx::new(296.0, 453.0), CentroidPx::new(427.0, 415.0));
        assert_eq!((r.horizontal, r.vertical), (Horizontal::Right, Vertical::Above));
        let p = CentroidPx::new(4.0, 4.0);
        let r = relative_position(p, p);
        assert_eq!((r.horizontal, r.vertical), (Horizontal::Aligned, Vertical::Aligned));
        let r = relative_position(CentroidPx::new(0.0, 0.0), CentroidPx::new(0.0, 9.0));
        assert_eq!((r.horizontal, r.vertical), (Horizontal::Aligned, Vertical::Below));
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(round_half_up(2.5), 3.0);
        assert_eq!(round_half_up(2.49), 2.0);
        assert_eq!(round_tenth(204.55), 204.6);
        assert_eq!(round_tenth(1.04), 1.0);
    }

    fn arb_point() -> impl Strategy<Value = CentroidPx> {
        (-1e4..1e4f64, -1e4..1e4f64).prop_map(|(x, y)| CentroidPx::new(x, y))
    }

    proptest! {
        #[test]
        fn centroid_inside_bbox(pixels in prop::collection::vec((0u32..200, 0u32..200), 1..60)) {
            let b = blob_from(&pixels);
            prop_assert!(bbox(&b).contains(centroid(&b)));
        }

        #[test]
        fn centroid_is_translation_equivariant(
            pixels in prop::collection::vec((0u32..200, 0u32..200), 1..60),
            dx in 0u32..500,
            dy in 0u32..500,
        ) {
            let c = centroid(&blob_from(&pixels));
            let moved: Vec<_> = pixels.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
            let cm = centroid(&blob_from(&moved));
            prop_assert!((cm.x - c.x - dx as f64).abs() < 1e-9);
            prop_assert!((cm.y - c.y - dy as f64).abs() < 1e-9);
        }

        #[test]
        fn distance_is_a_metric(a in arb_point(), b in arb_point(), c in arb_point()) {
            let ab = distance_px(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, distance_px(b, a));
            prop_assert!(ab <= distance_px(a, c) + distance_px(c, b) + 1e-9);
            prop_assert_eq!(distance_px(a, a), 0.0);
            if a != b {
                prop_assert!(ab > 0.0);
            }
        }

        #[test]
        fn distance_is_translation_invariant(a in arb_point(), b in arb_point(), dx in -1e3..1e3f64, dy in -1e3..1e3f64) {
            let shift = |p: CentroidPx| CentroidPx::new(p.x + dx, p.y + dy);
            prop_assert!((distance_px(a, b) - distance_px(shift(a), shift(b))).abs() < 1e-6);
        }

        #[test]
        fn px_to_mm_is_linear(a in 0.0..1e5f64, b in 0.0..1e5f64, side in 0.01..10.0f64) {
            let cal = Calibration::new(side).unwrap();
            let lhs = px_to_mm(a + b, &cal).unwrap();
            let rhs = px_to_mm(a, &cal).unwrap() + px_to_mm(b, &cal).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1.0));
        }

        #[test]
        fn area_matches_side_squared(n in 0u64..1_000_000, side in 0.01..10.0f64) {
            let cal = Calibration::new(side).unwrap();
            let side_mm = px_to_mm(1.0, &cal).unwrap();
            prop_assert!((cal.mm2_per_px() - side_mm * side_mm).abs() < 1e-9);
            let expected = n as f64 * side_mm * side_mm;
            prop_assert!((area_mm2(n, &cal) - expected).abs() <= 1e-9 * expected.max(1.0));
        }
    }
}
