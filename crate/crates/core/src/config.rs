//! Settings resolution: command-line flags over config file over defaults.
//!
//! The config file is TOML with the same kebab-case keys as the long flags:
//!
//! ```toml
//! min-dominant = 100
//! dominance-margin = 50
//! black-max = 60
//! white-min = 180
//! gap-px = 10
//! min-area-px = 1112
//! mm-per-px = 1.5
//! stages = "baseline,full"
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::classify::ClassifierConfig;
use crate::geometry::Calibration;
use crate::harness::scene::{DEFAULT_HEIGHT, DEFAULT_WIDTH};
use crate::harness::StageSet;
use crate::pipeline::PipelineConfig;
use crate::segment::SegmentationConfig;
use crate::Parallelism;

pub const CONFIG_ENV: &str = "CHROMASEG_CONFIG";

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FRAMES: usize = 60;
pub const DEFAULT_RUNS: usize = 10;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid setting: {0}")]
    Invalid(String),
}

/// Every tunable, each optional so layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigLayer {
    pub min_dominant: Option<u8>,
    pub dominance_margin: Option<u8>,
    pub black_max: Option<u8>,
    pub white_min: Option<u8>,
    pub gap_px: Option<u32>,
    pub min_area_px: Option<u64>,
    pub mm_per_px: Option<f64>,
    pub equalize: Option<bool>,
    pub all_pairs: Option<bool>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub stages: Option<String>,
    pub frames: Option<usize>,
    pub runs: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $bottom:expr, $($field:ident),+ $(,)?) => {
        ConfigLayer { $($field: $top.$field.clone().or_else(|| $bottom.$field.clone())),+ }
    };
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Values in `self` win over values in `lower`.
    pub fn over(&self, lower: &ConfigLayer) -> ConfigLayer {
        overlay!(
            self, lower, min_dominant, dominance_margin, black_max, white_min, gap_px, min_area_px,
            mm_per_px, equalize, all_pairs, threads, seed, width, height, stages, frames, runs,
        )
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub pipeline: PipelineConfig,
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub stages: Vec<StageSet>,
    pub frames: usize,
    pub runs: usize,
}

pub fn parse_stages(list: &str) -> Result<Vec<StageSet>, ConfigError> {
    let mut stages = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<StageSet>().map_err(ConfigError::Invalid))
        .collect::<Result<Vec<_>, _>>()?;
    if stages.is_empty() {
        return Err(ConfigError::Invalid("stage list is empty".into()));
    }
    stages.sort();
    stages.dedup();
    Ok(stages)
}

impl Settings {
    pub fn resolve(layer: &ConfigLayer) -> Result<Self, ConfigError> {
        let d = ClassifierConfig::default();
        let classifier = ClassifierConfig {
            min_dominant: layer.min_dominant.unwrap_or(d.min_dominant),
            dominance_margin: layer.dominance_margin.unwrap_or(d.dominance_margin),
            black_max: layer.black_max.unwrap_or(d.black_max),
            white_min: layer.white_min.unwrap_or(d.white_min),
        };
        classifier
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let sd = SegmentationConfig::default();
        let segmentation = SegmentationConfig {
            gap_px: layer.gap_px.unwrap_or(sd.gap_px),
            min_area_px: layer.min_area_px.unwrap_or(sd.min_area_px),
        };
        segmentation
            .validate()
            .map_err(|e| ConfigError::Invalid(e.into()))?;

        let calibration = match layer.mm_per_px {
            Some(mm) => Calibration::new(mm).map_err(|e| ConfigError::Invalid(e.to_string()))?,
            None => Calibration::default(),
        };

        let threads = match layer.threads {
            Some(0) => return Err(ConfigError::Invalid("threads must be at least 1".into())),
            t => t,
        };
        let parallelism = if threads == Some(1) {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        };

        let frames = layer.frames.unwrap_or(DEFAULT_FRAMES);
        if frames == 0 {
            return Err(ConfigError::Invalid("frames must be at least 1".into()));
        }
        let runs = layer.runs.unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            return Err(ConfigError::Invalid("runs must be at least 1".into()));
        }
        let width = layer.width.unwrap_or(DEFAULT_WIDTH);
        let height = layer.height.unwrap_or(DEFAULT_HEIGHT);
        if width == 0 || height == 0 {
            return Err(ConfigError::Invalid("frame dimensions must be at least 1".into()));
        }
        let stages = parse_stages(layer.stages.as_deref().unwrap_or("full"))?;

        Ok(Self {
            pipeline: PipelineConfig {
                classifier,
                segmentation,
                calibration,
                equalize: layer.equalize.unwrap_or(false),
                all_pairs: layer.all_pairs.unwrap_or(false),
                parallelism,
            },
            threads,
            seed: layer.seed.unwrap_or(DEFAULT_SEED),
            width,
            height,
            stages,
            frames,
            runs,
        })
    }
}
