//! Gap-based grouping of same-class pixels into objects.
//!
//! Two pixels of the same class belong to the same object when a chain of
//! same-class pixels connects them with every hop at Chebyshev distance
//! `<= gap_px`. A gap equal to `gap_px` therefore still merges; only a gap of
//! `gap_px + 1` or more starts a new object.
//!
//! The fast path works on horizontal runs: runs from rows at most `gap_px`
//! apart are linked when their column intervals are within `gap_px`, which is
//! exactly the Chebyshev condition between their closest pixels.

mod oracle;

pub use oracle::{segment_oracle, OracleError, ORACLE_MAX_PIXELS};

use rayon::prelude::*;

use crate::classify::{ClassMask, ColorClass};
use crate::Parallelism;

/// Default minimum object area: ceil(2500 mm² / 2.25 mm² per pixel).
pub const DEFAULT_MIN_AREA_PX: u64 = 1112;
pub const DEFAULT_GAP_PX: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentationConfig {
    pub gap_px: u32,
    pub min_area_px: u64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            gap_px: DEFAULT_GAP_PX,
            min_area_px: DEFAULT_MIN_AREA_PX,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.gap_px < 1 {
            return Err("gap_px must be at least 1");
        }
        if self.min_area_px < 1 {
            return Err("min_area_px must be at least 1");
        }
        Ok(())
    }
}

/// One segmented object: its pixel statistics and extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blob {
    pub id: usize,
    pub color: ColorClass,
    pub pixel_count: u64,
    pub sum_x: u64,
    pub sum_y: u64,
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl Blob {
    pub(crate) fn single(color: ColorClass, x: u32, y: u32) -> Self {
        Self {
            id: 0,
            color,
            pixel_count: 1,
            sum_x: x as u64,
            sum_y: y as u64,
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    pub(crate) fn absorb(&mut self, other: &Blob) {
        self.pixel_count += other.pixel_count;
        self.sum_x += other.sum_x;
        self.sum_y += other.sum_y;
        self.min_x = self.min_x.min(other.min_x);
        self.min_y = self.min_y.min(other.min_y);
        self.max_x = self.max_x.max(other.max_x);
        self.max_y = self.max_y.max(other.max_y);
    }
}

/// Keeps blobs with at least `min_area_px` pixels, in order, ids untouched.
pub fn filter_min_area(blobs: Vec<Blob>, min_area_px: u64) -> Vec<Blob> {
    blobs
        .into_iter()
        .filter(|b| b.pixel_count >= min_area_px)
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Run {
    y: u32,
    x0: u32,
    x1: u32,
    class: ColorClass,
}

impl Run {
    fn stats(&self) -> Blob {
        let len = (self.x1 - self.x0 + 1) as u64;
        Blob {
            id: 0,
            color: self.class,
            pixel_count: len,
            sum_x: (self.x0 as u64 + self.x1 as u64) * len / 2,
            sum_y: self.y as u64 * len,
            min_x: self.x0,
            min_y: self.y,
            max_x: self.x1,
            max_y: self.y,
        }
    }
}

fn row_runs(row: &[ColorClass], y: u32) -> Vec<Run> {
    let mut runs = Vec::new();
    let mut x = 0;
    while x < row.len() {
        let class = row[x];
        let start = x;
        while x < row.len() && row[x] == class {
            x += 1;
        }
        if class.is_object() {
            runs.push(Run {
                y,
                x0: start as u32,
                x1: (x - 1) as u32,
                class,
            });
        }
    }
    runs
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Segments all object-class pixels of `mask` into blobs.
///
/// Blobs smaller than `min_area_px` are dropped; survivors get ids `0..n` in
/// raster order of their first pixel. The result does not depend on
/// `parallelism`.
pub fn segment(mask: &ClassMask, cfg: &SegmentationConfig, parallelism: Parallelism) -> Vec<Blob> {
    let rows: Vec<Vec<Run>> = match parallelism {
        Parallelism::Sequential => (0..mask.height()).map(|y| row_runs(mask.row(y), y)).collect(),
        Parallelism::Parallel => (0..mask.height())
            .into_par_iter()
            .map(|y| row_runs(mask.row(y), y))
            .collect(),
    };

    // flat run indices in raster order
    let mut row_start = Vec::with_capacity(rows.len() + 1);
    let mut runs = Vec::new();
    for r in rows {
        row_start.push(runs.len());
        runs.extend(r);
    }
    row_start.push(runs.len());

    let gap = cfg.gap_px as i64;
    let mut sets = DisjointSet::new(runs.len());
    for (i, run) in runs.iter().enumerate() {
        let y = run.y as usize;
        let first_row = y.saturating_sub(cfg.gap_px as usize);
        for yy in first_row..=y {
            let candidates = &runs[row_start[yy]..row_start[yy + 1]];
            // runs in a row are disjoint and sorted, so x1 is increasing
            let lo = candidates.partition_point(|s| (s.x1 as i64) < run.x0 as i64 - gap);
            for (k, other) in candidates[lo..].iter().enumerate() {
                let j = row_start[yy] + lo + k;
                if j >= i || other.x0 as i64 > run.x1 as i64 + gap {
                    break;
                }
                if other.class == run.class {
                    sets.union(i, j);
                }
            }
        }
    }

    let mut root_slot = vec![usize::MAX; runs.len()];
    let mut blobs: Vec<Blob> = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let root = sets.find(i);
        let stats = run.stats();
        match root_slot[root] {
            usize::MAX => {
                root_slot[root] = blobs.len();
                blobs.push(stats);
            }
            slot => blobs[slot].absorb(&stats),
        }
    }
    finalize(blobs, cfg.min_area_px)
}

/// Drops small blobs and numbers the survivors. `blobs` must already be in
/// raster order of first pixel.
pub(crate) fn finalize(blobs: Vec<Blob>, min_area_px: u64) -> Vec<Blob> {
    let mut kept = filter_min_area(blobs, min_area_px);
    for (id, b) in kept.iter_mut().enumerate() {
        b.id = id;
    }
    kept
}
