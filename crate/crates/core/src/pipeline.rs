//! End-to-end scene processing: classify, segment, measure, pick the
//! reference object, compute distances and render the annotated frame.

use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify_image, ClassMask, ClassifierConfig, ClassifierConfigError, ColorClass};
use crate::geometry::{
    area_mm2, bbox, centroid, distance_px, relative_position, round_half_up, round_tenth,
    BoundingBox, Calibration, CentroidPx, Horizontal, RelativePosition, Vertical,
};
use crate::raster::{equalize_histogram, PixelRgb, RasterImage};
use crate::segment::{segment, Blob, SegmentationConfig};
use crate::Parallelism;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Bounding-box outline color for obstacles.
pub const OUTLINE_COLOR: PixelRgb = PixelRgb::new(255, 255, 0);
/// Centroid marker color.
pub const MARKER_COLOR: PixelRgb = PixelRgb::new(255, 0, 255);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub classifier: ClassifierConfig,
    pub segmentation: SegmentationConfig,
    pub calibration: Calibration,
    /// Run per-channel histogram equalization before classification.
    pub equalize: bool,
    /// Measure every object pair instead of reference -> red/blue only.
    pub all_pairs: bool,
    pub parallelism: Parallelism,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            classifier: ClassifierConfig::default(),
            segmentation: SegmentationConfig::default(),
            calibration: Calibration::default(),
            equalize: false,
            all_pairs: false,
            parallelism: Parallelism::Parallel,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Classifier(#[from] ClassifierConfigError),
    #[error("invalid segmentation config: {0}")]
    Segmentation(&'static str),
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.classifier.validate()?;
        self.segmentation
            .validate()
            .map_err(PipelineError::Segmentation)?;
        Ok(())
    }
}

/// Measurements of one detected object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectRecord {
    pub id: usize,
    pub color: ColorClass,
    pub centroid_px: CentroidPx,
    pub centroid_mm: (f64, f64),
    pub bbox: BoundingBox,
    pub area_px: u64,
    pub area_mm2: f64,
}

impl ObjectRecord {
    pub fn from_blob(blob: &Blob, cal: &Calibration) -> Self {
        let c = centroid(blob);
        Self {
            id: blob.id,
            color: blob.color,
            centroid_px: c,
            centroid_mm: (c.x * cal.mm_per_px(), c.y * cal.mm_per_px()),
            bbox: bbox(blob),
            area_px: blob.pixel_count,
            area_mm2: area_mm2(blob.pixel_count, cal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRecord {
    pub from: usize,
    pub to: usize,
    pub px: f64,
    pub relative: RelativePosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameInfo {
    pub width: u32,
    pub height: u32,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneReport {
    pub frame: FrameInfo,
    pub objects: Vec<ObjectRecord>,
    pub reference_id: Option<usize>,
    pub distances: Vec<DistanceRecord>,
    pub calibration: Calibration,
}

impl SceneReport {
    pub fn object(&self, id: usize) -> Option<&ObjectRecord> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Serializes to the versioned JSON report, followed by a newline.
    ///
    /// Pixel coordinates and distances are rounded half up to integers,
    /// millimetre lengths to one decimal. Distance millimetres derive from the
    /// rounded pixel distance so each px/mm pair reads consistently.
    pub fn to_json(&self) -> String {
        let mm = self.calibration.mm_per_px();
        let wire = WireReport {
            schema: REPORT_SCHEMA_VERSION,
            frame: WireFrame {
                w: self.frame.width,
                h: self.frame.height,
                source: &self.frame.source,
            },
            objects: self
                .objects
                .iter()
                .map(|o| WireObject {
                    id: o.id,
                    color: o.color,
                    centroid_px: [
                        round_half_up(o.centroid_px.x) as i64,
                        round_half_up(o.centroid_px.y) as i64,
                    ],
                    centroid_mm: [round_tenth(o.centroid_mm.0), round_tenth(o.centroid_mm.1)],
                    bbox: o.bbox.as_array(),
                    area_px: o.area_px,
                    area_mm2: o.area_mm2,
                })
                .collect(),
            reference_id: self.reference_id,
            distances: self
                .distances
                .iter()
                .map(|d| {
                    let px = round_half_up(d.px);
                    WireDistance {
                        from: d.from,
                        to: d.to,
                        px: px as u64,
                        mm: round_tenth(px * mm),
                        horizontal: d.relative.horizontal,
                        vertical: d.relative.vertical,
                    }
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct WireReport<'a> {
    schema: u32,
    frame: WireFrame<'a>,
    objects: Vec<WireObject>,
    reference_id: Option<usize>,
    distances: Vec<WireDistance>,
}

#[derive(Serialize)]
struct WireFrame<'a> {
    w: u32,
    h: u32,
    source: &'a str,
}

#[derive(Serialize)]
struct WireObject {
    id: usize,
    color: ColorClass,
    centroid_px: [i64; 2],
    centroid_mm: [f64; 2],
    bbox: [u32; 4],
    area_px: u64,
    area_mm2: f64,
}

#[derive(Serialize)]
struct WireDistance {
    from: usize,
    to: usize,
    px: u64,
    mm: f64,
    horizontal: Horizontal,
    vertical: Vertical,
}

/// Largest green object; ties go to the lower id.
pub fn select_reference(objects: &[ObjectRecord]) -> Option<usize> {
    objects
        .iter()
        .filter(|o| o.color == ColorClass::Green)
        .min_by(|a, b| b.area_px.cmp(&a.area_px).then(a.id.cmp(&b.id)))
        .map(|o| o.id)
}

fn distance_entry(from: &ObjectRecord, to: &ObjectRecord) -> DistanceRecord {
    DistanceRecord {
        from: from.id,
        to: to.id,
        px: distance_px(from.centroid_px, to.centroid_px),
        relative: relative_position(from.centroid_px, to.centroid_px),
    }
}

/// Distances from the reference to every red or blue object, or between all
/// object pairs when `all_pairs` is set.
pub fn compute_distances(
    objects: &[ObjectRecord],
    reference_id: Option<usize>,
    all_pairs: bool,
) -> Vec<DistanceRecord> {
    if all_pairs {
        let mut out = Vec::new();
        for (i, a) in objects.iter().enumerate() {
            for b in &objects[i + 1..] {
                out.push(distance_entry(a, b));
            }
        }
        return out;
    }
    let Some(reference) = reference_id.and_then(|id| objects.iter().find(|o| o.id == id)) else {
        return Vec::new();
    };
    objects
        .iter()
        .filter(|o| o.id != reference.id && matches!(o.color, ColorClass::Red | ColorClass::Blue))
        .map(|o| distance_entry(reference, o))
        .collect()
}

/// Builds the report from already segmented blobs.
pub fn measure(
    blobs: &[Blob],
    frame: FrameInfo,
    cal: &Calibration,
    all_pairs: bool,
) -> SceneReport {
    let objects: Vec<ObjectRecord> = blobs.iter().map(|b| ObjectRecord::from_blob(b, cal)).collect();
    let reference_id = select_reference(&objects);
    let distances = compute_distances(&objects, reference_id, all_pairs);
    SceneReport {
        frame,
        objects,
        reference_id,
        distances,
        calibration: *cal,
    }
}

/// Everything produced by one pipeline pass.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: SceneReport,
    pub annotated: RasterImage,
    pub mask: ClassMask,
    pub blobs: Vec<Blob>,
}

pub fn run_pipeline(
    img: &RasterImage,
    source: &str,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    cfg.validate()?;
    let equalized;
    let working = if cfg.equalize {
        equalized = equalize_histogram(img);
        &equalized
    } else {
        img
    };
    let mask = classify_image(working, &cfg.classifier, cfg.parallelism);
    let blobs = segment(&mask, &cfg.segmentation, cfg.parallelism);
    let frame = FrameInfo {
        width: img.width(),
        height: img.height(),
        source: source.to_owned(),
    };
    let report = measure(&blobs, frame, &cfg.calibration, cfg.all_pairs);
    let annotated = annotate(img, &mask, &report);
    Ok(PipelineOutput {
        report,
        annotated,
        mask,
        blobs,
    })
}

/// Paints every classified pixel in its class's saturated color.
pub fn recolor(img: &RasterImage, mask: &ClassMask) -> RasterImage {
    let mut out = img.clone();
    for (px, class) in out.bgr_mut().chunks_exact_mut(3).zip(mask.as_slice()) {
        if let Some(c) = class.saturated() {
            px.copy_from_slice(&[c.b, c.g, c.r]);
        }
    }
    out
}

/// Recolors classified pixels, outlines each black object one pixel outside
/// its bounding box (clamped to the frame) and marks every centroid with a
/// 3×3 cross.
pub fn annotate(img: &RasterImage, mask: &ClassMask, report: &SceneReport) -> RasterImage {
    let mut out = recolor(img, mask);
    let (w, h) = (img.width() as i64, img.height() as i64);
    let put = |out: &mut RasterImage, x: i64, y: i64, c: PixelRgb| {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            out.set_pixel(x as u32, y as u32, c).expect("bounds checked");
        }
    };

    for o in report.objects.iter().filter(|o| o.color == ColorClass::Black) {
        let x0 = (o.bbox.min_x as i64 - 1).max(0);
        let y0 = (o.bbox.min_y as i64 - 1).max(0);
        let x1 = (o.bbox.max_x as i64 + 1).min(w - 1);
        let y1 = (o.bbox.max_y as i64 + 1).min(h - 1);
        for x in x0..=x1 {
            put(&mut out, x, y0, OUTLINE_COLOR);
            put(&mut out, x, y1, OUTLINE_COLOR);
        }
        for y in y0..=y1 {
            put(&mut out, x0, y, OUTLINE_COLOR);
            put(&mut out, x1, y, OUTLINE_COLOR);
        }
    }

    for o in &report.objects {
        let cx = round_half_up(o.centroid_px.x) as i64;
        let cy = round_half_up(o.centroid_px.y) as i64;
        for (dx, dy) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)] {
            put(&mut out, cx + dx, cy + dy, MARKER_COLOR);
        }
    }
    out
}
