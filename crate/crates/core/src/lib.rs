//! Color blob detection, segmentation and measurement for RGB rasters.
//!
//! The processing chain mirrors a classic fixed-camera setup: a white
//! backdrop, saturated red, green, blue and black objects, and a camera
//! whose pixels map to a known physical size.
//!
//! 1. [`raster`] stores frames (BGR, row-major) and reads/writes PPM.
//! 2. [`classify`] assigns each pixel a [`classify::ColorClass`] by its
//!    dominant channel.
//! 3. [`segment`] groups same-class pixels separated by at most `gap_px`
//!    into [`segment::Blob`]s and drops those under `min_area_px`.
//! 4. [`geometry`] turns blobs into centroids, boxes, distances and
//!    millimetres.
//! 5. [`pipeline`] ties it together into a [`pipeline::SceneReport`] and an
//!    annotated frame.
//!
//! [`harness`] generates synthetic scenes with exact ground truth and times
//! the stages.

pub mod classify;
pub mod cli;
pub mod config;
pub mod geometry;
pub mod harness;
pub mod pipeline;
pub mod raster;
pub mod segment;

/// Whether per-row work may be spread across the rayon pool. Results are
/// identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}
