//! The JSON manifest shared by the layout and render stages.
//!
//! ```json
//! {
//!   "canvas": {"width": 128, "height": 128},
//!   "placements": [{"feature": "f1", "row": 0, "col": 0, "height": 64,
//!                   "length": 128, "font_size": 64, "trims": 0}],
//!   "dropped": [],
//!   "weights": {"f1": 0.5},
//!   "files": [{"path": "train/a/0.png", "row_index": 0, "label": "a", "split": "train"}]
//! }
//! ```
//!
//! `files` is present only after rendering.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::association::WeightTable;
use crate::layout::{CanvasConfig, Layout, LayoutError, Placement};
use crate::render::{RenderError, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub row_index: usize,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub canvas: CanvasConfig,
    pub placements: Vec<Placement>,
    pub dropped: Vec<String>,
    /// Weight per feature, in schema order.
    pub weights: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub files: Option<Vec<FileRecord>>,
}

impl Manifest {
    pub fn new(layout: &Layout, weights: &WeightTable) -> Self {
        Manifest {
            canvas: layout.canvas,
            placements: layout.placements.clone(),
            dropped: layout.dropped.clone(),
            weights: weights.iter().map(|(f, w)| (f.to_owned(), w)).collect(),
            files: None,
        }
    }

    /// The layout part, checked for bounds and overlap.
    pub fn layout(&self) -> Result<Layout, LayoutError> {
        let layout = Layout {
            canvas: self.canvas,
            placements: self.placements.clone(),
            dropped: self.dropped.clone(),
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn write(&self, path: &Path) -> Result<(), RenderError> {
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text).map_err(|source| RenderError::Io {
            path: path.to_owned(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self, RenderError> {
        let text = fs::read_to_string(path).map_err(|source| RenderError::Io {
            path: path.to_owned(),
            source,
        })?;
        Manifest::from_json(&text).map_err(|source| RenderError::Json {
            path: path.to_owned(),
            source,
        })
    }
}
