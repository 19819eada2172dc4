//! Staged throughput measurement.
//!
//! Every stage set does the work of the previous one plus its own, so the
//! difference between two stage sets isolates the added stage's cost.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::classify::classify_image;
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineError};
use crate::raster::RasterImage;
use crate::segment::segment;

use super::scene::{gen_scene, SceneError, SceneSpec};

/// Frames processed before timing starts in each run.
pub const WARMUP_FRAMES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageSet {
    /// Pixel traversal only.
    Baseline,
    Classify,
    ClassifySegment,
    /// Classification, segmentation, measurement and annotation.
    Full,
}

impl StageSet {
    pub const ALL: [StageSet; 4] = [
        StageSet::Baseline,
        StageSet::Classify,
        StageSet::ClassifySegment,
        StageSet::Full,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StageSet::Baseline => "baseline",
            StageSet::Classify => "classify",
            StageSet::ClassifySegment => "classify+segment",
            StageSet::Full => "full",
        }
    }
}

impl std::fmt::Display for StageSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for StageSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "baseline" => Ok(StageSet::Baseline),
            "classify" => Ok(StageSet::Classify),
            "classify+segment" | "segment" => Ok(StageSet::ClassifySegment),
            "full" => Ok(StageSet::Full),
            other => Err(format!(
                "unknown stage set {other:?} (expected baseline, classify, classify+segment or full)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("frames must be at least 1")]
    NoFrames,
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("cannot summarize an empty record list")]
    EmptyRecords,
    #[error("baseline fps must be positive, got {0}")]
    NonPositiveBaseline(f64),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// One timed run: `frames` frames in `elapsed_s` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub elapsed_s: f64,
    pub frames: u64,
}

impl BenchRecord {
    pub fn new(elapsed_s: f64, frames: u64) -> Self {
        Self { elapsed_s, frames }
    }

    /// Unrounded frames per second.
    pub fn fps(&self) -> f64 {
        self.frames as f64 / self.elapsed_s
    }

    /// Seconds per frame, `1 / fps`.
    pub fn sampling_period(&self) -> f64 {
        1.0 / self.fps()
    }
}

/// Mean of the unrounded per-run fps values.
pub fn summarize(records: &[BenchRecord]) -> Result<f64, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyRecords);
    }
    Ok(records.iter().map(BenchRecord::fps).sum::<f64>() / records.len() as f64)
}

/// Cost of a variant against the baseline: `(fps lost, percent of baseline)`.
pub fn overhead(baseline_mean: f64, variant_mean: f64) -> Result<(f64, f64), BenchError> {
    if baseline_mean.is_nan() || baseline_mean <= 0.0 {
        return Err(BenchError::NonPositiveBaseline(baseline_mean));
    }
    let delta = baseline_mean - variant_mean;
    Ok((delta, delta / baseline_mean * 100.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub stage_set: String,
    pub mean_fps: f64,
    pub delta_fps: Option<f64>,
    pub percent: Option<f64>,
}

impl BenchSummary {
    pub fn new(stage: StageSet, records: &[BenchRecord], baseline_mean: Option<f64>) -> Result<Self, BenchError> {
        let mean_fps = summarize(records)?;
        let (delta_fps, percent) = match baseline_mean {
            Some(b) => {
                let (d, p) = overhead(b, mean_fps)?;
                (Some(d), Some(p))
            }
            None => (None, None),
        };
        Ok(Self {
            stage_set: stage.label().to_owned(),
            mean_fps,
            delta_fps,
            percent,
        })
    }
}

pub const CSV_HEADER: &str = "stage_set,elapsed_s,frames,fps,sampling_s";

pub fn csv_row(stage: StageSet, r: &BenchRecord) -> String {
    format!(
        "{},{:.6},{},{:.4},{:.6}",
        stage.label(),
        r.elapsed_s,
        r.frames,
        r.fps(),
        r.sampling_period()
    )
}

fn traverse(img: &RasterImage) -> u64 {
    img.pixels()
        .fold(0u64, |acc, (_, _, p)| acc.wrapping_add(p.r as u64 + p.g as u64 + p.b as u64))
}

fn process(stage: StageSet, img: &RasterImage, cfg: &PipelineConfig) {
    black_box(traverse(black_box(img)));
    match stage {
        StageSet::Baseline => {}
        StageSet::Classify => {
            black_box(classify_image(img, &cfg.classifier, cfg.parallelism));
        }
        StageSet::ClassifySegment => {
            let mask = classify_image(img, &cfg.classifier, cfg.parallelism);
            black_box(segment(&mask, &cfg.segmentation, cfg.parallelism));
        }
        StageSet::Full => {
            black_box(run_pipeline(img, "", cfg).expect("config validated"));
        }
    }
}

/// Times `runs` passes of `frames` frames each over a memory-resident pool,
/// cycling through `pool` in order.
pub fn run_bench_frames(
    stage: StageSet,
    frames: usize,
    runs: usize,
    pool: &[RasterImage],
    cfg: &PipelineConfig,
) -> Result<Vec<BenchRecord>, BenchError> {
    if frames == 0 || pool.is_empty() {
        return Err(BenchError::NoFrames);
    }
    if runs == 0 {
        return Err(BenchError::NoRuns);
    }
    cfg.validate()?;
    let mut records = Vec::with_capacity(runs);
    for _ in 0..runs {
        for img in pool.iter().cycle().take(WARMUP_FRAMES) {
            process(stage, img, cfg);
        }
        let start = Instant::now();
        for img in pool.iter().cycle().take(frames) {
            process(stage, img, cfg);
        }
        let elapsed = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        records.push(BenchRecord::new(elapsed, frames as u64));
    }
    Ok(records)
}

/// Renders `scene` once and benchmarks `stage` on it.
pub fn run_bench(
    stage: StageSet,
    frames: usize,
    runs: usize,
    scene: &SceneSpec,
    cfg: &PipelineConfig,
) -> Result<Vec<BenchRecord>, BenchError> {
    if frames == 0 {
        return Err(BenchError::NoFrames);
    }
    let (img, _) = gen_scene(scene)?;
    run_bench_frames(stage, frames, runs, std::slice::from_ref(&img), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_math() {
        let r = BenchRecord::new(1.0, 21);
        assert_eq!(r.fps(), 21.0);
        assert!((r.sampling_period() - 0.0476).abs() < 0.0005);
        assert_eq!(BenchRecord::new(3.0, 84).fps(), 28.0);
    }

    #[test]
    fn summarize_and_overhead_edges() {
        assert_eq!(summarize(&[]), Err(BenchError::EmptyRecords));
        assert_eq!(summarize(&[BenchRecord::new(2.0, 47)]).unwrap(), 23.5);
        assert_eq!(overhead(10.0, 10.0).unwrap(), (0.0, 0.0));
        assert!(matches!(overhead(0.0, 1.0), Err(BenchError::NonPositiveBaseline(_))));
        let (d, p) = overhead(22.54, 16.54).unwrap();
        assert!((d - 6.0).abs() < 1e-9);
        assert!((p - 26.62).abs() < 0.005, "{p}");
    }

    #[test]
    fn stage_labels_round_trip() {
        for s in StageSet::ALL {
            assert_eq!(s.label().parse::<StageSet>().unwrap(), s);
        }
        assert!("warp".parse::<StageSet>().is_err());
    }

    #[test]
    fn preconditions() {
        let scene = SceneSpec::default_scene(1, 64, 48);
        // tiny frame cannot host the default composition
        assert!(scene.is_err());
        let scene = SceneSpec::default_scene(1, 640, 480).unwrap();
        let cfg = PipelineConfig::default();
        assert_eq!(run_bench(StageSet::Full, 0, 1, &scene, &cfg), Err(BenchError::NoFrames));
        assert_eq!(run_bench(StageSet::Full, 1, 0, &scene, &cfg), Err(BenchError::NoRuns));
        let records = run_bench(StageSet::Baseline, 3, 2, &scene, &cfg).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.frames == 3 && r.elapsed_s > 0.0));
    }

    #[test]
    fn csv_layout() {
        let row = csv_row(StageSet::Baseline, &BenchRecord::new(1.0, 21));
        assert_eq!(row, "baseline,1.000000,21,21.0000,0.047619");
    }
}
