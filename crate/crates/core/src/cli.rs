//! Command-line front end.
//!
//! Exit codes: 0 success, 2 unreadable input or unwritable output,
//! 3 invalid configuration or scene description.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::ColorClass;
use crate::config::{ConfigError, ConfigLayer, Settings, CONFIG_ENV};
use crate::harness::bench::{csv_row, CSV_HEADER};
use crate::harness::{gen_scene, run_bench, BenchSummary, SceneSpec, ShapeKind, ShapeSpec, StageSet};
use crate::pipeline::run_pipeline;
use crate::raster::{load_ppm, load_raw_bgr, save_ppm, RasterImage, RAW_MAGIC};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chromaseg", version, about = "Color object segmentation and measurement")]
pub struct Cli {
    /// TOML config file; keys match the long flag names.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect, segment and measure objects in a PPM (or CSRW raw) image.
    Segment {
        input: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the annotated image (PPM) here.
        #[arg(long)]
        annotate: Option<PathBuf>,
    },
    /// Render a synthetic scene and its ground truth.
    GenScene {
        /// Output PPM path.
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth JSON path; defaults to the output path with a `.truth.json` suffix.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Explicit shape `color:kind:x,y:wxh`, e.g. `red:rect:100,100:50x50`.
        /// Without any, a random scene (one green, red and blue, two black) is drawn from the seed.
        #[arg(long = "shape")]
        shapes: Vec<String>,
    },
    /// Time the processing stages on a synthetic scene.
    Bench {
        /// CSV output path (stdout when absent).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary JSON-lines output path (stderr when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
struct Overrides {
    #[arg(long, global = true)]
    min_dominant: Option<u8>,
    #[arg(long, global = true)]
    dominance_margin: Option<u8>,
    #[arg(long, global = true)]
    black_max: Option<u8>,
    #[arg(long, global = true)]
    white_min: Option<u8>,
    #[arg(long, global = true)]
    gap_px: Option<u32>,
    #[arg(long, global = true)]
    min_area_px: Option<u64>,
    #[arg(long, global = true)]
    mm_per_px: Option<f64>,
    /// Equalize each channel's histogram before classification.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    equalize: Option<bool>,
    /// Report distances between every pair of objects.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    all_pairs: Option<bool>,
    /// Worker threads; 1 runs every stage sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    width: Option<u32>,
    #[arg(long, global = true)]
    height: Option<u32>,
    /// Comma-separated stage sets: baseline, classify, classify+segment, full.
    #[arg(long, global = true)]
    stages: Option<String>,
    #[arg(long, global = true)]
    frames: Option<usize>,
    #[arg(long, global = true)]
    runs: Option<usize>,
}

impl Overrides {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            min_dominant: self.min_dominant,
            dominance_margin: self.dominance_margin,
            black_max: self.black_max,
            white_min: self.white_min,
            gap_px: self.gap_px,
            min_area_px: self.min_area_px,
            mm_per_px: self.mm_per_px,
            equalize: self.equalize,
            all_pairs: self.all_pairs,
            threads: self.threads,
            seed: self.seed,
            width: self.width,
            height: self.height,
            stages: self.stages.clone(),
            frames: self.frames,
            runs: self.runs,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Config(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn resolve_settings(cli: &Cli) -> Result<Settings, CliError> {
    let file = match &cli.config {
        Some(path) => ConfigLayer::from_file(path)?,
        None => ConfigLayer::default(),
    };
    Ok(Settings::resolve(&cli.overrides.layer().over(&file))?)
}

/// Runs `f` on a dedicated pool when a thread count is set.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

fn load_image(path: &Path) -> Result<RasterImage, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.starts_with(RAW_MAGIC) {
        load_raw_bgr(&bytes).map_err(|e| io_err(path, e))
    } else {
        load_ppm(&bytes).map_err(|e| io_err(path, e))
    }
}

fn cmd_segment(
    settings: &Settings,
    input: &Path,
    report: Option<&Path>,
    annotate: Option<&Path>,
) -> Result<(), CliError> {
    let img = load_image(input)?;
    let source = input
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let out = with_threads(settings.threads, || run_pipeline(&img, &source, &settings.pipeline))?
        .map_err(|e| CliError::Config(e.to_string()))?;
    let json = out.report.to_json();
    match report {
        Some(path) => write_file(path, json.as_bytes())?,
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    if let Some(path) = annotate {
        write_file(path, &save_ppm(&out.annotated))?;
    }
    Ok(())
}

/// Parses `color:kind:x,y:wxh`.
pub fn parse_shape(s: &str) -> Result<ShapeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [color, kind, origin, size] = parts[..] else {
        return Err(format!("shape {s:?} must look like color:kind:x,y:wxh"));
    };
    let pair = |text: &str, sep: char| -> Result<(u32, u32), String> {
        let (a, b) = text
            .split_once(sep)
            .ok_or_else(|| format!("expected two numbers separated by '{sep}' in {text:?}"))?;
        let num = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
        Ok((num(a)?, num(b)?))
    };
    let color: ColorClass = color.parse()?;
    let kind: ShapeKind = kind.parse()?;
    Ok(ShapeSpec {
        color,
        kind,
        origin: pair(origin, ',')?,
        size: pair(size, 'x')?,
    })
}

fn truth_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".truth.json");
    out.with_file_name(name)
}

fn cmd_gen_scene(settings: &Settings, out: &Path, truth: Option<&Path>, shapes: &[String]) -> Result<(), CliError> {
    let spec = if shapes.is_empty() {
        SceneSpec::default_scene(settings.seed, settings.width, settings.height)
            .map_err(|e| CliError::Config(e.to_string()))?
    } else {
        SceneSpec {
            seed: settings.seed,
            width: settings.width,
            height: settings.height,
            shapes: shapes
                .iter()
                .map(|s| parse_shape(s))
                .collect::<Result<_, _>>()
                .map_err(CliError::Config)?,
        }
    };
    let (img, gt) = gen_scene(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(out, &save_ppm(&img))?;
    let truth = truth.map(Path::to_path_buf).unwrap_or_else(|| truth_path(out));
    write_file(&truth, gt.to_json().as_bytes())?;
    Ok(())
}

fn cmd_bench(settings: &Settings, csv: Option<&Path>, summary: Option<&Path>) -> Result<(), CliError> {
    let scene = SceneSpec::default_scene(settings.seed, settings.width, settings.height)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut results = Vec::new();
    for &stage in &settings.stages {
        let records = with_threads(settings.threads, || {
            run_bench(stage, settings.frames, settings.runs, &scene, &settings.pipeline)
        })?
        .map_err(|e| CliError::Config(e.to_string()))?;
        results.push((stage, records));
    }

    let mut csv_text = String::from(CSV_HEADER);
    csv_text.push('\n');
    for (stage, records) in &results {
        for r in records {
            csv_text.push_str(&csv_row(*stage, r));
            csv_text.push('\n');
        }
    }

    // stages are sorted, so a baseline run comes first
    let baseline_mean = match results.first() {
        Some((StageSet::Baseline, records)) => {
            Some(crate::harness::summarize(records).map_err(|e| CliError::Config(e.to_string()))?)
        }
        _ => None,
    };
    let mut summary_text = String::new();
    let mut human = String::new();
    for (stage, records) in &results {
        let s = BenchSummary::new(*stage, records, baseline_mean).map_err(|e| CliError::Config(e.to_string()))?;
        summary_text.push_str(&serde_json::to_string(&s).expect("summary serialization cannot fail"));
        summary_text.push('\n');
        if let (Some(d), Some(p), true) = (s.delta_fps, s.percent, *stage != StageSet::Baseline) {
            human.push_str(&format!(
                "overhead {stage} vs baseline: {d:.2} fps ({p:.2}%), mean {:.2} fps\n",
                s.mean_fps
            ));
        }
    }

    match csv {
        Some(path) => write_file(path, csv_text.as_bytes())?,
        None => std::io::stdout()
            .write_all(csv_text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    match summary {
        Some(path) => write_file(path, summary_text.as_bytes())?,
        None => eprint!("{summary_text}"),
    }
    eprint!("{human}");
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let settings = resolve_settings(cli)?;
    match &cli.command {
        Command::Segment {
            input,
            report,
            annotate,
        } => cmd_segment(&settings, input, report.as_deref(), annotate.as_deref()),
        Command::GenScene { out, truth, shapes } => cmd_gen_scene(&settings, out, truth.as_deref(), shapes),
        Command::Bench { csv, summary } => cmd_bench(&settings, csv.as_deref(), summary.as_deref()),
    }
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("chromaseg: {}", e.message());
            e.exit_code()
        }
    }
}
