//! Deterministic synthetic scenes with exact ground truth.
//!
//! Shapes are painted in saturated class colors on a white frame. Pixel
//! `(x, y)` has its center at integer coordinates, so a `w × h` rectangle at
//! `(x0, y0)` has centroid `(x0 + (w-1)/2, y0 + (h-1)/2)`. Ellipses are
//! inscribed in their `size` box and are symmetric about the same center.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::ColorClass;
use crate::geometry::BoundingBox;
use crate::raster::{PixelRgb, RasterImage};

pub const DEFAULT_WIDTH: u32 = 640;
pub const DEFAULT_HEIGHT: u32 = 480;
const PLACEMENT_ATTEMPTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Rectangle,
    Ellipse,
}

impl std::str::FromStr for ShapeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rect" | "rectangle" => Ok(ShapeKind::Rectangle),
            "ellipse" => Ok(ShapeKind::Ellipse),
            other => Err(format!("unknown shape kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub color: ColorClass,
    pub kind: ShapeKind,
    /// Top-left corner of the shape's box.
    pub origin: (u32, u32),
    /// Box width and height; an ellipse's semi-axes are half of these.
    pub size: (u32, u32),
}

impl ShapeSpec {
    fn box_extent(&self) -> BoundingBox {
        BoundingBox {
            min_x: self.origin.0,
            min_y: self.origin.1,
            max_x: self.origin.0 + self.size.0 - 1,
            max_y: self.origin.1 + self.size.1 - 1,
        }
    }

    fn center(&self) -> (f64, f64) {
        (
            self.origin.0 as f64 + (self.size.0 as f64 - 1.0) / 2.0,
            self.origin.1 as f64 + (self.size.1 as f64 - 1.0) / 2.0,
        )
    }

    /// Whether pixel `(x, y)` (already inside the box) is covered.
    fn covers(&self, x: u32, y: u32) -> bool {
        match self.kind {
            ShapeKind::Rectangle => true,
            ShapeKind::Ellipse => {
                let (cx, cy) = self.center();
                let a = self.size.0 as f64 / 2.0;
                let b = self.size.1 as f64 / 2.0;
                let dx = (x as f64 - cx) / a;
                let dy = (y as f64 - cy) / b;
                dx * dx + dy * dy <= 1.0
            }
        }
    }

    fn pixel_area(&self) -> u64 {
        let e = self.box_extent();
        (e.min_y..=e.max_y)
            .map(|y| (e.min_x..=e.max_x).filter(|&x| self.covers(x, y)).count() as u64)
            .sum()
    }

    pub fn analytic_area(&self) -> f64 {
        let (w, h) = (self.size.0 as f64, self.size.1 as f64);
        match self.kind {
            ShapeKind::Rectangle => w * h,
            ShapeKind::Ellipse => std::f64::consts::PI * w * h / 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub shapes: Vec<ShapeSpec>,
}

/// Placement rules for randomly generated scenes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneConstraints {
    /// Same-color shapes are kept more than this many pixels apart.
    pub gap_px: u32,
    /// Every generated shape covers at least this many pixels.
    pub min_area_px: u64,
    /// Largest box side to draw.
    pub max_side: u32,
}

impl Default for SceneConstraints {
    fn default() -> Self {
        Self {
            gap_px: crate::segment::DEFAULT_GAP_PX,
            min_area_px: crate::segment::DEFAULT_MIN_AREA_PX,
            max_side: 90,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SceneError {
    #[error("frame must be at least 1x1")]
    EmptyFrame,
    #[error("shape {index} ({w}x{h} at {x},{y}) does not fit in the {width}x{height} frame")]
    OutOfFrame {
        index: usize,
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        width: u32,
        height: u32,
    },
    #[error("shape {index} has an empty size")]
    EmptyShape { index: usize },
    #[error("shape {index} uses non-object color {color}")]
    NotAnObjectColor { index: usize, color: ColorClass },
    #[error("could not place shape {index} after {attempts} attempts")]
    Unsatisfiable { index: usize, attempts: usize },
}

/// Exact per-shape measurements of a rendered scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeTruth {
    pub color: ColorClass,
    pub kind: ShapeKind,
    /// Mean coordinate of the pixels the shape covers in the final image.
    pub centroid: (f64, f64),
    pub area_px: u64,
    pub analytic_area: f64,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub shapes: Vec<ShapeTruth>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Chebyshev distance between the nearest pixels of two boxes; 0 if they overlap.
fn box_gap(a: &BoundingBox, b: &BoundingBox) -> u32 {
    let dx = b.min_x.saturating_sub(a.max_x).max(a.min_x.saturating_sub(b.max_x));
    let dy = b.min_y.saturating_sub(a.max_y).max(a.min_y.saturating_sub(b.max_y));
    dx.max(dy)
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.width == 0 || self.height == 0 {
            return Err(SceneError::EmptyFrame);
        }
        for (index, s) in self.shapes.iter().enumerate() {
            if !s.color.is_object() {
                return Err(SceneError::NotAnObjectColor {
                    index,
                    color: s.color,
                });
            }
            if s.size.0 == 0 || s.size.1 == 0 {
                return Err(SceneError::EmptyShape { index });
            }
            let fits = (s.origin.0 as u64 + s.size.0 as u64) <= self.width as u64
                && (s.origin.1 as u64 + s.size.1 as u64) <= self.height as u64;
            if !fits {
                return Err(SceneError::OutOfFrame {
                    index,
                    x: s.origin.0,
                    y: s.origin.1,
                    w: s.size.0,
                    h: s.size.1,
                    width: self.width,
                    height: self.height,
                });
            }
        }
        Ok(())
    }

    /// Places `counts` shapes of each color at random, honoring `constraints`.
    /// Different colors never overlap; same colors stay more than `gap_px` apart.
    pub fn random(
        seed: u64,
        width: u32,
        height: u32,
        counts: &[(ColorClass, usize)],
        constraints: &SceneConstraints,
    ) -> Result<Self, SceneError> {
        if width == 0 || height == 0 {
            return Err(SceneError::EmptyFrame);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rect_min = (constraints.min_area_px as f64).sqrt().ceil() as u32;
        let ellipse_min = (constraints.min_area_px as f64 * 4.0 / std::f64::consts::PI).sqrt().ceil() as u32 + 2;
        let mut shapes: Vec<ShapeSpec> = Vec::new();
        let colors = counts.iter().flat_map(|&(c, n)| std::iter::repeat_n(c, n));
        for (index, color) in colors.enumerate() {
            if !color.is_object() {
                return Err(SceneError::NotAnObjectColor { index, color });
            }
            let mut placed = None;
            for _ in 0..PLACEMENT_ATTEMPTS {
                let kind = if rng.random_bool(0.5) {
                    ShapeKind::Rectangle
                } else {
                    ShapeKind::Ellipse
                };
                let lo = match kind {
                    ShapeKind::Rectangle => rect_min,
                    ShapeKind::Ellipse => ellipse_min,
                }
                .max(1);
                let hi = constraints.max_side.max(lo);
                let w = rng.random_range(lo..=hi);
                let h = rng.random_range(lo..=hi);
                if w > width || h > height {
                    continue;
                }
                let x = rng.random_range(0..=width - w);
                let y = rng.random_range(0..=height - h);
                let candidate = ShapeSpec {
                    color,
                    kind,
                    origin: (x, y),
                    size: (w, h),
                };
                let extent = candidate.box_extent();
                let clear = shapes.iter().all(|other| {
                    let gap = box_gap(&extent, &other.box_extent());
                    if other.color == color {
                        gap > constraints.gap_px
                    } else {
                        gap >= 1
                    }
                });
                if clear && candidate.pixel_area() >= constraints.min_area_px {
                    placed = Some(candidate);
                    break;
                }
            }
            match placed {
                Some(s) => shapes.push(s),
                None => {
                    return Err(SceneError::Unsatisfiable {
                        index,
                        attempts: PLACEMENT_ATTEMPTS,
                    })
                }
            }
        }
        Ok(Self {
            seed,
            width,
            height,
            shapes,
        })
    }

    /// The default composition: one green, one red, one blue and two black shapes.
    pub fn default_scene(seed: u64, width: u32, height: u32) -> Result<Self, SceneError> {
        Self::random(
            seed,
            width,
            height,
            &[
                (ColorClass::Green, 1),
                (ColorClass::Red, 1),
                (ColorClass::Blue, 1),
                (ColorClass::Black, 2),
            ],
            &SceneConstraints::default(),
        )
    }
}

/// Renders `spec`. Later shapes paint over earlier ones; the ground truth
/// reflects the final coverage.
pub fn gen_scene(spec: &SceneSpec) -> Result<(RasterImage, GroundTruth), SceneError> {
    spec.validate()?;
    let mut img = RasterImage::filled(spec.width, spec.height, PixelRgb::WHITE)
        .map_err(|_| SceneError::EmptyFrame)?;
    let w = spec.width as usize;
    let mut owner: Vec<Option<usize>> = vec![None; w * spec.height as usize];
    for (i, s) in spec.shapes.iter().enumerate() {
        let color = s.color.saturated().expect("validated object color");
        let e = s.box_extent();
        for y in e.min_y..=e.max_y {
            for x in e.min_x..=e.max_x {
                if s.covers(x, y) {
                    img.set_pixel(x, y, color).expect("validated extent");
                    owner[y as usize * w + x as usize] = Some(i);
                }
            }
        }
    }

    let mut stats: Vec<Option<(u64, u64, u64, BoundingBox)>> = vec![None; spec.shapes.len()];
    for (idx, o) in owner.iter().enumerate() {
        let Some(i) = *o else { continue };
        let (x, y) = ((idx % w) as u32, (idx / w) as u32);
        let entry = stats[i].get_or_insert((
            0,
            0,
            0,
            BoundingBox {
                min_x: x,
                min_y: y,
                max_x: x,
                max_y: y,
            },
        ));
        entry.0 += 1;
        entry.1 += x as u64;
        entry.2 += y as u64;
        entry.3.min_x = entry.3.min_x.min(x);
        entry.3.min_y = entry.3.min_y.min(y);
        entry.3.max_x = entry.3.max_x.max(x);
        entry.3.max_y = entry.3.max_y.max(y);
    }

    let shapes = spec
        .shapes
        .iter()
        .zip(stats)
        .map(|(s, st)| {
            let (n, sx, sy, bbox) = st.unwrap_or((0, 0, 0, s.box_extent()));
            let centroid = if n == 0 {
                s.center()
            } else {
                (sx as f64 / n as f64, sy as f64 / n as f64)
            };
            ShapeTruth {
                color: s.color,
                kind: s.kind,
                centroid,
                area_px: n,
                analytic_area: s.analytic_area(),
                bbox,
            }
        })
        .collect();

    Ok((
        img,
        GroundTruth {
            seed: spec.seed,
            width: spec.width,
            height: spec.height,
            shapes,
        },
    ))
}
