//! Dynamic weighted tabular-to-image encoding.
//!
//! Every row of a tabular dataset becomes one grayscale image. Each feature is
//! printed as text inside a rectangle whose area is proportional to how
//! strongly that feature is associated with the class label:
//!
//! 1. [`ingest`] parses a CSV file into a typed [`Dataset`].
//! 2. [`association`] scores each feature against the label (absolute Pearson
//!    r for numeric features, Cramér's V for categorical ones) and normalizes
//!    the scores into weights.
//! 3. [`layout`] turns weights into feature boxes, packs them onto the canvas
//!    with a row-major first-fit scan, and shrinks boxes that do not fit.
//! 4. [`render`] prints every row's values into its boxes with a monospace
//!    bitmap font and writes a class-labeled PNG tree plus a manifest.
//!
//! [`pipeline`] chains the stages together and backs the `dwtm` binary.
//!
//! ```
//! use dwtm::layout::{compute_boxes, insert_boxes, CanvasConfig};
//! use dwtm::association::{AssociationMethod, AssociationScore, WeightTable};
//!
//! let scores = [("a", 0.5), ("b", 0.3), ("c", 0.2)]
//!     .iter()
//!     .map(|(name, r)| AssociationScore::new(*name, AssociationMethod::Pearson, *r))
//!     .collect();
//! let weights = WeightTable::from_scores(scores).unwrap();
//! let canvas = CanvasConfig::new(128, 128).unwrap();
//! let boxes = compute_boxes(&weights, &[2, 3, 4], canvas).unwrap();
//! let layout = insert_boxes(boxes, canvas);
//! assert_eq!(layout.placements.len(), 3);
//! assert_eq!((layout.placements[2].row, layout.placements[2].col), (104, 0));
//! ```

pub mod association;
pub mod ingest;
pub mod layout;
pub mod manifest;
pub mod pipeline;
pub mod render;

pub use association::{compute_weights, AssociationScore, WeightTable};
pub use ingest::{Dataset, FeatureKind, FeatureSpec, Schema};
pub use layout::{CanvasConfig, FeatureBox, Layout, Placement};
pub use manifest::Manifest;
pub use pipeline::{Error, PipelineConfig};
pub use render::{RenderConfig, RenderJob};
