//! End-to-end orchestration: CSV in, weights, layout manifest, image tree out.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::{compute_weights, AssociationError, WeightTable};
use crate::ingest::{self, Dataset, FeatureKind, IngestError, IngestOptions, MissingPolicy, ParseOptions};
use crate::layout::{plan_layout, CanvasConfig, LayoutError};
use crate::manifest::Manifest;
use crate::render::{emit_dataset, FontId, RenderConfig, RenderError, SplitConfig};

/// Process exit codes used by the `dwtm` binary.
pub mod exit_code {
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const SCHEMA: i32 = 4;
    pub const NO_SIGNAL: i32 = 5;
    pub const IO: i32 = 6;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Association(#[from] AssociationError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => exit_code::CONFIG,
            Error::Ingest(e) if e.is_parse_error() => exit_code::PARSE,
            Error::Ingest(_) => exit_code::SCHEMA,
            Error::Association(AssociationError::NoSignal) => exit_code::NO_SIGNAL,
            Error::Association(_) => exit_code::SCHEMA,
            Error::Render(
                RenderError::Io { .. } | RenderError::Image { .. } | RenderError::Json { .. } | RenderError::OutputNotEmpty(_),
            ) => exit_code::IO,
            Error::Io { .. } => exit_code::IO,
            Error::Layout(_) | Error::Render(_) => exit_code::OTHER,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One layer of settings, as read from a JSON config file or the command
/// line. Unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub input: Option<PathBuf>,
    pub target: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub split: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub kinds: BTreeMap<String, FeatureKind>,
    pub missing: Option<MissingPolicy>,
    pub missing_tokens: Option<Vec<String>>,
    #[serde(default)]
    pub collapse_labels: BTreeMap<String, String>,
    pub delimiter: Option<char>,
    pub header: Option<bool>,
    pub background: Option<u8>,
    pub foreground: Option<u8>,
}

impl ConfigLayer {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Field-wise merge; values in `over` win.
    pub fn overlay(mut self, over: ConfigLayer) -> ConfigLayer {
        self.kinds.extend(over.kinds);
        self.collapse_labels.extend(over.collapse_labels);
        ConfigLayer {
            input: over.input.or(self.input),
            target: over.target.or(self.target),
            width: over.width.or(self.width),
            height: over.height.or(self.height),
            split: over.split.or(self.split),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            kinds: self.kinds,
            missing: over.missing.or(self.missing),
            missing_tokens: over.missing_tokens.or(self.missing_tokens),
            collapse_labels: self.collapse_labels,
            delimiter: over.delimiter.or(self.delimiter),
            header: over.header.or(self.header),
            background: over.background.or(self.background),
            foreground: over.foreground.or(self.foreground),
        }
    }
}

/// Fully resolved settings for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub target: String,
    pub canvas: CanvasConfig,
    pub split: SplitConfig,
    pub out: PathBuf,
    pub parse: ParseOptions,
    pub ingest: IngestOptions,
    pub render: RenderConfig,
}

pub const DEFAULT_CANVAS: u32 = 128;
pub const DEFAULT_SPLIT: f64 = 0.8;
pub const MIN_CANVAS: u32 = 8;

impl PipelineConfig {
    /// Resolves a stack of layers over the defaults; later layers win.
    pub fn resolve<I: IntoIterator<Item = ConfigLayer>>(layers: I) -> Result<Self> {
        let c = layers.into_iter().fold(ConfigLayer::default(), ConfigLayer::overlay);
        let input = c.input.ok_or_else(|| Error::Config("no input file given".into()))?;
        let target = c.target.ok_or_else(|| Error::Config("no target column given".into()))?;
        let (width, height) = (c.width.unwrap_or(DEFAULT_CANVAS), c.height.unwrap_or(DEFAULT_CANVAS));
        if width < MIN_CANVAS || height < MIN_CANVAS {
            return Err(Error::Config(format!(
                "canvas must be at least {MIN_CANVAS}x{MIN_CANVAS}, got {width}x{height}"
            )));
        }
        let canvas = CanvasConfig::new(width, height)?;
        let split = SplitConfig {
            fraction: c.split.unwrap_or(DEFAULT_SPLIT),
            seed: c.seed.unwrap_or(0),
        };
        split.validate().map_err(|e| Error::Config(e.to_string()))?;

        let delimiter = c.delimiter.unwrap_or(',');
        if !delimiter.is_ascii() {
            return Err(Error::Config(format!("delimiter `{delimiter}` is not ASCII")));
        }
        let parse = ParseOptions {
            delimiter: delimiter as u8,
            has_header: c.header.unwrap_or(true),
        };
        let defaults = IngestOptions::default();
        let ingest = IngestOptions {
            kinds: c.kinds,
            missing: c.missing.unwrap_or_default(),
            missing_tokens: c.missing_tokens.unwrap_or(defaults.missing_tokens),
            collapse_labels: c.collapse_labels,
        };
        let render = RenderConfig {
            canvas,
            background: c.background.unwrap_or(0),
            foreground: c.foreground.unwrap_or(255),
            font: FontId::Font8x8,
        };
        render.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(PipelineConfig {
            input,
            target,
            canvas,
            split,
            out: c.out.unwrap_or_else(|| PathBuf::from("dwtm_out")),
            parse,
            ingest,
            render,
        })
    }
}

pub fn load_dataset(config: &PipelineConfig) -> Result<Dataset> {
    let file = File::open(&config.input).map_err(|source| Error::Io {
        path: config.input.clone(),
        source,
    })?;
    let dataset = ingest::load_csv(BufReader::new(file), &config.target, &config.parse, &config.ingest)?;
    log::info!(
        "loaded {} rows, {} features, {} classes from {}",
        dataset.row_count(),
        dataset.schema().features.len(),
        dataset.schema().class_labels.len(),
        config.input.display()
    );
    Ok(dataset)
}

pub fn cmd_weights(config: &PipelineConfig) -> Result<WeightTable> {
    let dataset = load_dataset(config)?;
    Ok(compute_weights(&dataset)?)
}

/// Weights and layout for the configured dataset.
pub fn build_manifest(dataset: &Dataset, canvas: CanvasConfig) -> Result<Manifest> {
    let weights = compute_weights(dataset)?;
    let layout = plan_layout(&weights, dataset.schema(), canvas)?;
    if !layout.dropped.is_empty() {
        log::warn!("features dropped from the canvas: {}", layout.dropped.join(", "));
    }
    Ok(Manifest::new(&layout, &weights))
}

/// Computes the layout manifest and writes it to `<out>/layout.json`.
pub fn cmd_layout(config: &PipelineConfig) -> Result<Manifest> {
    let dataset = load_dataset(config)?;
    let manifest = build_manifest(&dataset, config.canvas)?;
    fs::create_dir_all(&config.out).map_err(|source| Error::Io {
        path: config.out.clone(),
        source,
    })?;
    manifest.write(&layout_path(&config.out))?;
    Ok(manifest)
}

pub fn layout_path(out: &Path) -> PathBuf {
    out.join("layout.json")
}

/// Full run: weights, layout, and the rendered image tree under `config.out`.
pub fn cmd_encode(config: &PipelineConfig) -> Result<Manifest> {
    let dataset = load_dataset(config)?;
    let manifest = build_manifest(&dataset, config.canvas)?;
    Ok(emit_dataset(&dataset, &manifest, &config.render, &config.split, &config.out)?)
}

#[derive(Serialize)]
struct WeightRow<'a> {
    feature: &'a str,
    method: String,
    raw: f64,
    magnitude: f64,
    weight: f64,
}

pub fn weight_table_json(weights: &WeightTable) -> String {
    let rows: Vec<WeightRow<'_>> = weights
        .scores
        .iter()
        .zip(&weights.weights)
        .map(|(s, &weight)| WeightRow {
            feature: &s.feature,
            method: s.method.to_string(),
            raw: s.raw,
            magnitude: s.magnitude,
            weight,
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("weight rows serialize")
}

pub fn weight_table_text(weights: &WeightTable) -> String {
    let name_width = weights.scores.iter().map(|s| s.feature.chars().count()).max().unwrap_or(0).max(7);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:<9}  {:>10}  {:>10}  {:>10}",
        "feature", "method", "raw", "magnitude", "weight"
    );
    for (s, w) in weights.scores.iter().zip(&weights.weights) {
        let _ = writeln!(
            out,
            "{:<name_width$}  {:<9}  {:>10.6}  {:>10.6}  {:>10.6}{}",
            s.feature,
            s.method.to_string(),
            s.raw,
            s.magnitude,
            w,
            if s.degenerate { "  (degenerate)" } else { "" }
        );
    }
    out
}
