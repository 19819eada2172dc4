//! Synthetic scenes with ground truth, and the staged throughput benchmark.

pub mod bench;
pub mod scene;

pub use bench::{
    overhead, run_bench, run_bench_frames, summarize, BenchError, BenchRecord, BenchSummary, StageSet,
};
pub use scene::{gen_scene, GroundTruth, SceneConstraints, SceneError, SceneSpec, ShapeKind, ShapeSpec, ShapeTruth};
