//! Rasterization of data rows into grayscale images.

mod emit;
pub mod font;

use std::path::PathBuf;

use image::{GrayImage, Luma};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, FeatureSpec, Value};
use crate::layout::{CanvasConfig, Layout, LayoutError};

pub use emit::{emit_dataset, split_rows, sanitize_label, Split, SplitConfig};
pub use font::FontId;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("value `{value}` of `{feature}` needs more than {max_chars} characters")]
    ValueTooWide {
        feature: String,
        value: String,
        max_chars: usize,
    },
    #[error("`{feature}` holds a non-finite number")]
    NonFinite { feature: String },
    #[error("background and foreground must differ (both {0})")]
    SameColors(u8),
    #[error("render canvas {render:?} does not match layout canvas {layout:?}")]
    CanvasMismatch { render: CanvasConfig, layout: CanvasConfig },
    #[error("no value supplied for placed feature `{0}`")]
    MissingValue(String),
    #[error("placed feature `{0}` is not in the dataset")]
    UnknownFeature(String),
    #[error("split fraction must be in (0, 1], got {0}")]
    InvalidSplit(f64),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0} already contains files not written by a previous run")]
    OutputNotEmpty(PathBuf),
}

pub type Result<T, E = RenderError> = std::result::Result<T, E>;

/// Shortest decimal string that parses back to `x`. Never uses exponent notation.
pub fn shortest_decimal(x: f64) -> String {
    format!("{x}")
}

/// Formats a cell for printing into a box `spec.max_chars` characters wide.
///
/// Categorical tokens are printed verbatim. Numbers use their shortest exact
/// decimal form when it fits; otherwise they are rounded to as many decimal
/// places as the width allows, keeping the sign and integer digits.
pub fn format_value(value: Value<'_>, spec: &FeatureSpec) -> Result<String> {
    let max = spec.max_chars;
    let too_wide = |value: String| RenderError::ValueTooWide {
        feature: spec.name.clone(),
        value,
        max_chars: max,
    };
    match value {
        Value::Categorical(s) => {
            if s.chars().count() <= max {
                Ok(s.to_owned())
            } else {
                Err(too_wide(s.to_owned()))
            }
        }
        Value::Numeric(x) => {
            if !x.is_finite() {
                return Err(RenderError::NonFinite {
                    feature: spec.name.clone(),
                });
            }
            let exact = shortest_decimal(x);
            if exact.len() <= max {
                return Ok(exact);
            }
            // "d.d" needs at least 3 characters, so precision is at most max - 2.
            for precision in (0..=max.saturating_sub(2)).rev() {
                let rounded = format!("{x:.precision$}");
                if rounded.len() <= max {
                    return Ok(rounded);
                }
            }
            Err(too_wide(exact))
        }
    }
}

/// Canvas, colors and font shared by every rendered row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub canvas: CanvasConfig,
    pub background: u8,
    pub foreground: u8,
    #[serde(default)]
    pub font: FontId,
}

impl RenderConfig {
    /// White glyphs on a black background.
    pub fn new(canvas: CanvasConfig) -> Self {
        RenderConfig {
            canvas,
            background: 0,
            foreground: 255,
            font: FontId::Font8x8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.background == self.foreground {
            return Err(RenderError::SameColors(self.background));
        }
        Ok(())
    }
}

/// One data row bound to a layout.
#[derive(Debug, Clone)]
pub struct RenderJob<'a> {
    pub row_index: usize,
    /// Formatted value per placed feature.
    pub values: IndexMap<String, String>,
    pub label: usize,
    pub layout: &'a Layout,
}

impl<'a> RenderJob<'a> {
    /// Formats row `row` of `dataset` for every feature placed in `layout`,
    /// fitting each value to the width of its box.
    pub fn from_dataset(dataset: &Dataset, row: usize, layout: &'a Layout) -> Result<Self> {
        let mut values = IndexMap::with_capacity(layout.placements.len());
        for p in &layout.placements {
            let spec = dataset
                .schema()
                .feature(&p.feature)
                .ok_or_else(|| RenderError::UnknownFeature(p.feature.clone()))?;
            let cell = dataset.columns()[&p.feature]
                .get(row)
                .ok_or_else(|| RenderError::MissingValue(p.feature.clone()))?;
            let boxed = FeatureSpec {
                max_chars: p.chars() as usize,
                ..spec.clone()
            };
            values.insert(p.feature.clone(), format_value(cell, &boxed)?);
        }
        Ok(RenderJob {
            row_index: row,
            values,
            label: dataset.labels()[row],
            layout,
        })
    }
}

/// Draws every placed value left-aligned in its box, one `height x height`
/// glyph cell per character. Dropped features draw nothing.
pub fn render_row(job: &RenderJob<'_>, config: &RenderConfig) -> Result<GrayImage> {
    config.validate()?;
    let layout = job.layout;
    if config.canvas != layout.canvas {
        return Err(RenderError::CanvasMismatch {
            render: config.canvas,
            layout: layout.canvas,
        });
    }
    let mut img = GrayImage::from_pixel(layout.canvas.width, layout.canvas.height, Luma([config.background]));
    for p in &layout.placements {
        let value = job
            .values
            .get(&p.feature)
            .ok_or_else(|| RenderError::MissingValue(p.feature.clone()))?;
        if value.chars().count() > p.chars() as usize {
            return Err(RenderError::ValueTooWide {
                feature: p.feature.clone(),
                value: value.clone(),
                max_chars: p.chars() as usize,
            });
        }
        for (i, ch) in value.chars().enumerate() {
            let col = p.col + i as u32 * p.height;
            config.font.draw(&mut img, ch, p.row, col, p.height, config.foreground);
        }
    }
    Ok(img)
}
