//! Canvas layout: weights become feature boxes, boxes are packed by a
//! row-major first-fit scan, and boxes that do not fit are shrunk one font
//! step at a time until they fit or vanish.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::WeightTable;
use crate::ingest::Schema;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("canvas dimensions must be positive, got {width}x{height}")]
    InvalidCanvas { width: u32, height: u32 },
    #[error("{weights} weights but {chars} character counts")]
    CharsMismatch { weights: usize, chars: usize },
    #[error("feature `{0}` has a character count of 0")]
    ZeroChars(String),
    #[error("feature `{0}` not found in schema")]
    UnknownFeature(String),
    #[error("placement of `{0}` lies outside the canvas")]
    OutOfBounds(String),
    #[error("placement of `{0}` overlaps an earlier placement")]
    Overlap(String),
    #[error("placement of `{0}` is inconsistent: {1}")]
    BadPlacement(String, String),
}

pub type Result<T, E = LayoutError> = std::result::Result<T, E>;

/// Canvas size in pixels: `width` columns by `height` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanvasConfig {
    pub width: u32,
    pub height: u32,
}

impl CanvasConfig {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(LayoutError::InvalidCanvas { width, height });
        }
        Ok(CanvasConfig { width, height })
    }

    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }
}

/// The rectangle one feature earns on the canvas.
///
/// Cells are square, so `length == height * chars` always holds; the height
/// doubles as the font size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBox {
    pub feature: String,
    /// Position of the feature in the schema, used as the final tie-breaker.
    pub order: usize,
    pub weight: f64,
    pub chars: u32,
    /// `weight * width * height`, before quantization.
    pub target_area: f64,
    pub initial_height: u32,
    pub height: u32,
    pub length: u32,
    pub trims: u32,
}

impl FeatureBox {
    pub fn new(feature: impl Into<String>, order: usize, weight: f64, chars: u32, canvas: CanvasConfig) -> Self {
        let target_area = weight * canvas.area() as f64;
        let height = floor_sqrt(target_area / chars as f64);
        FeatureBox {
            feature: feature.into(),
            order,
            weight,
            chars,
            target_area,
            initial_height: height,
            height,
            length: height * chars,
            trims: 0,
        }
    }

    /// Realized area, `height * length`.
    pub fn area(&self) -> u64 {
        self.height as u64 * self.length as u64
    }

    pub fn is_eliminated(&self) -> bool {
        self.height == 0
    }
}

/// Largest integer `h` with `h * h <= x`, exact near perfect squares.
fn floor_sqrt(x: f64) -> u32 {
    if x.is_nan() || x <= 0.0 {
        return 0;
    }
    let mut h = x.sqrt().floor().min(u32::MAX as f64) as u64;
    while h > 0 && (h * h) as f64 > x {
        h -= 1;
    }
    while ((h + 1) * (h + 1)) as f64 <= x {
        h += 1;
    }
    h as u32
}

/// Attempt order: realized area descending, then weight descending, then
/// schema order.
fn attempt_order(a: &FeatureBox, b: &FeatureBox) -> Ordering {
    b.area()
        .cmp(&a.area())
        .then_with(|| b.weight.total_cmp(&a.weight))
        .then_with(|| a.order.cmp(&b.order))
}

/// Sizes one box per feature with positive weight and returns them in
/// attempt order. `chars` is aligned with the weight table's feature order.
///
/// Zero-weight (degenerate) features get no box. Boxes whose height floors to
/// zero are kept; [`insert_boxes`] drops them straight away.
pub fn compute_boxes(weights: &WeightTable, chars: &[usize], canvas: CanvasConfig) -> Result<Vec<FeatureBox>> {
    if weights.len() != chars.len() {
        return Err(LayoutError::CharsMismatch {
            weights: weights.len(),
            chars: chars.len(),
        });
    }
    let mut boxes = Vec::with_capacity(chars.len());
    for (order, ((feature, weight), &n)) in weights.iter().zip(chars).enumerate() {
        if n == 0 {
            return Err(LayoutError::ZeroChars(feature.to_owned()));
        }
        if weight.is_nan() || weight <= 0.0 {
            continue;
        }
        let b = FeatureBox::new(feature, order, weight, n as u32, canvas);
        if b.is_eliminated() {
            log::warn!("feature `{feature}` is too small for the canvas and will be dropped");
        }
        boxes.push(b);
    }
    boxes.sort_by(attempt_order);
    Ok(boxes)
}

/// Same as [`compute_boxes`], looking up character counts in the schema.
pub fn compute_boxes_for_schema(weights: &WeightTable, schema: &Schema, canvas: CanvasConfig) -> Result<Vec<FeatureBox>> {
    let chars = weights
        .scores
        .iter()
        .map(|s| {
            schema
                .feature(&s.feature)
                .map(|f| f.max_chars)
                .ok_or_else(|| LayoutError::UnknownFeature(s.feature.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    compute_boxes(weights, &chars, canvas)
}

/// Shrinks a box by one font step: height − 1, length − chars.
///
/// A box already at height 0 comes back unchanged; check
/// [`FeatureBox::is_eliminated`].
pub fn trim_box(b: &FeatureBox) -> FeatureBox {
    if b.height == 0 {
        return b.clone();
    }
    let height = b.height - 1;
    FeatureBox {
        height,
        length: height * b.chars,
        trims: b.trims + 1,
        ..b.clone()
    }
}

/// Where a feature was placed: top-left corner `(row, col)` and its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub feature: String,
    pub row: u32,
    pub col: u32,
    pub height: u32,
    pub length: u32,
    pub font_size: u32,
    pub trims: u32,
}

impl Placement {
    /// Number of character cells in the box.
    pub fn chars(&self) -> u32 {
        self.length.checked_div(self.height).unwrap_or(0)
    }

    pub fn contains(&self, row: u32, col: u32) -> bool {
        row >= self.row && row < self.row + self.height && col >= self.col && col < self.col + self.length
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub canvas: CanvasConfig,
    /// In placement order.
    pub placements: Vec<Placement>,
    /// Features trimmed to height 0, in the order they were eliminated.
    pub dropped: Vec<String>,
}

impl Layout {
    pub fn placement(&self, feature: &str) -> Option<&Placement> {
        self.placements.iter().find(|p| p.feature == feature)
    }

    /// Checks bounds, box arithmetic and pairwise disjointness.
    pub fn validate(&self) -> Result<()> {
        CanvasGrid::from_layout(self).map(|_| ())
    }
}

/// Occupancy of every canvas pixel, with a summed-area table for O(1)
/// rectangle queries.
#[derive(Debug, Clone)]
pub struct CanvasGrid {
    width: u32,
    height: u32,
    cells: Vec<bool>,
    // (height + 1) x (width + 1) prefix sums of `cells`.
    sums: Vec<u32>,
}

impl CanvasGrid {
    pub fn new(canvas: CanvasConfig) -> Self {
        let (w, h) = (canvas.width as usize, canvas.height as usize);
        CanvasGrid {
            width: canvas.width,
            height: canvas.height,
            cells: vec![false; w * h],
            sums: vec![0; (w + 1) * (h + 1)],
        }
    }

    /// Paints every placement of `layout`, failing on the first overlap or
    /// out-of-bounds box.
    pub fn from_layout(layout: &Layout) -> Result<Self> {
        let mut grid = CanvasGrid::new(layout.canvas);
        for p in &layout.placements {
            if p.height == 0 || p.length % p.height != 0 || p.font_size != p.height {
                return Err(LayoutError::BadPlacement(
                    p.feature.clone(),
                    format!("height {} length {} font size {}", p.height, p.length, p.font_size),
                ));
            }
            grid.paint(p)?;
        }
        Ok(grid)
    }

    pub fn is_occupied(&self, row: u32, col: u32) -> bool {
        self.cells[row as usize * self.width as usize + col as usize]
    }

    pub fn occupied_count(&self) -> u64 {
        self.cells.iter().filter(|&&c| c).count() as u64
    }

    fn sum_at(&self, row: usize, col: usize) -> u32 {
        self.sums[row * (self.width as usize + 1) + col]
    }

    /// Number of occupied cells in the `height x length` block at `(row, col)`.
    fn occupied_in(&self, row: u32, col: u32, height: u32, length: u32) -> u32 {
        let (r0, c0) = (row as usize, col as usize);
        let (r1, c1) = (r0 + height as usize, c0 + length as usize);
        self.sum_at(r1, c1) + self.sum_at(r0, c0) - self.sum_at(r0, c1) - self.sum_at(r1, c0)
    }

    pub fn is_free(&self, row: u32, col: u32, height: u32, length: u32) -> bool {
        row as u64 + height as u64 <= self.height as u64
            && col as u64 + length as u64 <= self.width as u64
            && self.occupied_in(row, col, height, length) == 0
    }

    /// First free position in row-major order (rows outer, columns inner).
    pub fn first_fit(&self, height: u32, length: u32) -> Option<(u32, u32)> {
        if height == 0 || length == 0 || height > self.height || length > self.width {
            return None;
        }
        let free = self.width as u64 * self.height as u64 - self.occupied_count_fast();
        if free < height as u64 * length as u64 {
            return None;
        }
        for row in 0..=self.height - height {
            let mut col = 0;
            while col + length <= self.width {
                if self.occupied_in(row, col, height, length) == 0 {
                    return Some((row, col));
                }
                // Every window that still contains the last blocked column fails too.
                let mut last = col + length - 1;
                while self.occupied_in(row, last, height, 1) == 0 {
                    last -= 1;
                }
                col = last + 1;
            }
        }
        None
    }

    fn occupied_count_fast(&self) -> u64 {
        self.sum_at(self.height as usize, self.width as usize) as u64
    }

    /// Marks a placement's pixels, rejecting overlap or out-of-bounds boxes.
    pub fn paint(&mut self, p: &Placement) -> Result<()> {
        if p.row as u64 + p.height as u64 > self.height as u64 || p.col as u64 + p.length as u64 > self.width as u64 {
            return Err(LayoutError::OutOfBounds(p.feature.clone()));
        }
        if self.occupied_in(p.row, p.col, p.height, p.length) != 0 {
            return Err(LayoutError::Overlap(p.feature.clone()));
        }
        let w = self.width as usize;
        for r in p.row..p.row + p.height {
            let start = r as usize * w + p.col as usize;
            self.cells[start..start + p.length as usize].fill(true);
        }
        self.rebuild_sums(p.row as usize);
        Ok(())
    }

    /// Recomputes the summed-area rows at and below `from`; rows above are unchanged by a paint there.
    fn rebuild_sums(&mut self, from: usize) {
        let (w, h) = (self.width as usize, self.height as usize);
        let stride = w + 1;
        for r in from..h {
            let (above, below) = self.sums.split_at_mut((r + 1) * stride);
            let prev = &above[r * stride..];
            let cur = &mut below[..stride];
            let cells = &self.cells[r * w..(r + 1) * w];
            let mut row_sum = 0u32;
            for (c, &cell) in cells.iter().enumerate() {
                row_sum += cell as u32;
                cur[c + 1] = prev[c + 1] + row_sum;
            }
        }
    }
}

/// Packs boxes onto an empty canvas.
///
/// Each pass tries the pending boxes in attempt order and places each at the
/// first free position of a row-major scan. Boxes that found no room are all
/// trimmed by one step, re-sorted, and retried against the same grid; placed
/// boxes never move. A box trimmed to height 0 is dropped.
pub fn insert_boxes(boxes: Vec<FeatureBox>, canvas: CanvasConfig) -> Layout {
    let mut grid = CanvasGrid::new(canvas);
    let mut placements = Vec::with_capacity(boxes.len());
    let mut dropped = Vec::new();
    let mut pending = boxes;
    pending.sort_by(attempt_order);

    while !pending.is_empty() {
        let mut unplaced = Vec::new();
        for b in pending {
            if b.is_eliminated() {
                dropped.push(b.feature);
                continue;
            }
            match grid.first_fit(b.height, b.length) {
                Some((row, col)) => {
                    let p = Placement {
                        feature: b.feature,
                        row,
                        col,
                        height: b.height,
                        length: b.length,
                        font_size: b.height,
                        trims: b.trims,
                    };
                    grid.paint(&p).expect("first_fit returned a free block");
                    placements.push(p);
                }
                None => unplaced.push(b),
            }
        }
        pending = unplaced.iter().map(trim_box).collect();
        pending.sort_by(attempt_order);
    }

    Layout {
        canvas,
        placements,
        dropped,
    }
}

/// Boxes from weights and schema widths, then packed.
pub fn plan_layout(weights: &WeightTable, schema: &Schema, canvas: CanvasConfig) -> Result<Layout> {
    let boxes = compute_boxes_for_schema(weights, schema, canvas)?;
    Ok(insert_boxes(boxes, canvas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::{AssociationMethod, AssociationScore};

    fn weights(ws: &[f64]) -> WeightTable {
        WeightTable::from_scores(
            ws.iter()
                .enumerate()
                .map(|(i, w)| AssociationScore::new(format!("f{}", i + 1), AssociationMethod::Pearson, *w))
                .collect(),
        )
        .unwrap()
    }

    fn canvas(w: u32, h: u32) -> CanvasConfig {
        CanvasConfig::new(w, h).unwrap()
    }

    #[test]
    fn floor_sqrt_exact_at_squares() {
        for h in 0u64..2000 {
            assert_eq!(floor_sqrt((h * h) as f64), h as u32);
            if h > 0 {
                assert_eq!(floor_sqrt((h * h) as f64 - 1e-9), h as u32 - 1);
            }
        }
        assert_eq!(floor_sqrt(-1.0), 0);
        assert_eq!(floor_sqrt(f64::NAN), 0);
    }

    #[test]
    fn worked_example_boxes() {
        let boxes = compute_boxes(&weights(&[0.5, 0.3, 0.2]), &[2, 3, 4], canvas(128, 128)).unwrap();
        let dims: Vec<_> = boxes.iter().map(|b| (b.feature.as_str(), b.height, b.length)).collect();
        assert_eq!(dims, vec![("f1", 64, 128), ("f2", 40, 120), ("f3", 28, 112)]);
        assert_eq!(boxes[0].target_area, 8192.0);
        assert!((boxes[1].target_area - 4915.2).abs() < 1e-9);
        assert!((boxes[2].target_area - 3276.8).abs() < 1e-9);
    }

    #[test]
    fn trim_rule() {
        let c = canvas(128, 128);
        let mut b = FeatureBox::new("x", 0, 0.2, 4, c);
        assert_eq!((b.height, b.length), (28, 112));
        b = trim_box(&b);
        assert_eq!((b.height, b.length, b.trims), (27, 108, 1));
        assert_eq!(b.area(), 27 * 108);

        let mut b = FeatureBox::new("y", 0, 0.3, 3, c);
        b = trim_box(&b);
        assert_eq!((b.height, b.length), (39, 117));

        let mut one = FeatureBox::new("z", 0, 1.0, 5, canvas(5, 1));
        assert_eq!(one.height, 1);
        one = trim_box(&one);
        assert!(one.is_eliminated());
        assert_eq!(one.length, 0);
        let again = trim_box(&one);
        assert_eq!(again, one);
    }

    #[test]
    fn single_full_canvas_box() {
        let c = canvas(32, 32);
        let layout = insert_boxes(vec![FeatureBox::new("only", 0, 1.0, 1, c)], c);
        assert_eq!(layout.placements.len(), 1);
        let p = &layout.placements[0];
        assert_eq!((p.row, p.col, p.height, p.length), (0, 0, 32, 32));
    }

    #[test]
    fn worked_example_insertion() {
        let c = canvas(128, 128);
        let boxes = compute_boxes(&weights(&[0.5, 0.3, 0.2]), &[2, 3, 4], c).unwrap();
        let layout = insert_boxes(boxes, c);
        let got: Vec<_> = layout
            .placements
            .iter()
            .map(|p| (p.feature.as_str(), p.row, p.col, p.height, p.length, p.trims))
            .collect();
        assert_eq!(
            got,
            vec![
                ("f1", 0, 0, 64, 128, 0),
                ("f2", 64, 0, 40, 120, 0),
                ("f3", 104, 0, 24, 96, 4),
            ]
        );
        assert!(layout.dropped.is_empty());
        layout.validate().unwrap();
    }

    #[test]
    fn two_full_boxes_second_dies() {
        let c = canvas(16, 16);
        let boxes = vec![FeatureBox::new("a", 0, 1.0, 1, c), FeatureBox::new("b", 1, 1.0, 1, c)];
        let layout = insert_boxes(boxes, c);
        assert_eq!(layout.placements.len(), 1);
        assert_eq!(layout.dropped, vec!["b"]);
    }

    #[test]
    fn second_box_shrinks_into_remaining_rows() {
        let c = canvas(20, 20);
        let sized = |name: &str, order, chars, height| FeatureBox {
            feature: name.into(),
            order,
            weight: 0.5,
            chars,
            target_area: 0.0,
            initial_height: height,
            height,
            length: height * chars,
            trims: 0,
        };
        // 200 px² box first, then a 196 px² box that only fits once it is 10 tall.
        let layout = insert_boxes(vec![sized("b", 1, 1, 14), sized("a", 0, 2, 10)], c);
        let a = layout.placement("a").unwrap();
        assert_eq!((a.row, a.col, a.height, a.length), (0, 0, 10, 20));
        let b = layout.placement("b").unwrap();
        assert_eq!((b.row, b.col, b.height, b.length, b.trims), (10, 0, 10, 10, 4));
    }

    #[test]
    fn degenerate_features_get_no_box() {
        let mut w = weights(&[1.0, 1.0]);
        w.weights[1] = 0.0;
        let boxes = compute_boxes(&w, &[1, 1], canvas(8, 8)).unwrap();
        assert_eq!(boxes.len(), 1);
    }

    #[test]
    fn compute_boxes_errors() {
        let w = weights(&[1.0, 1.0]);
        assert_eq!(
            compute_boxes(&w, &[1], canvas(8, 8)),
            Err(LayoutError::CharsMismatch { weights: 2, chars: 1 })
        );
        assert_eq!(compute_boxes(&w, &[1, 0], canvas(8, 8)), Err(LayoutError::ZeroChars("f2".into())));
        assert!(CanvasConfig::new(0, 5).is_err());
    }

    #[test]
    fn tiny_boxes_dropped_immediately() {
        let c = canvas(8, 8);
        let boxes = compute_boxes(&weights(&[0.99, 0.01]), &[1, 4], c).unwrap();
        assert!(boxes[1].is_eliminated());
        let layout = insert_boxes(boxes, c);
        assert_eq!(layout.dropped, vec!["f2"]);
        assert_eq!(layout.placements[0].trims, 0);
    }

    #[test]
    fn ties_broken_by_weight_then_order() {
        let c = canvas(64, 64);
        let mut a = FeatureBox::new("a", 0, 0.2, 1, c);
        let mut b = FeatureBox::new("b", 1, 0.3, 1, c);
        let mut d = FeatureBox::new("d", 2, 0.3, 1, c);
        for x in [&mut a, &mut b, &mut d] {
            x.height = 4;
            x.length = 4;
        }
        let mut v = [a, d, b];
        v.sort_by(attempt_order);
        let names: Vec<_> = v.iter().map(|b| b.feature.as_str()).collect();
        assert_eq!(names, vec!["b", "d", "a"]);
    }

    #[test]
    fn grid_rejects_overlap_and_out_of_bounds() {
        let mut g = CanvasGrid::new(canvas(10, 10));
        let p = |r, c, h, l| Placement {
            feature: "p".into(),
            row: r,
            col: c,
            height: h,
            length: l,
            font_size: h,
            trims: 0,
        };
        g.paint(&p(0, 0, 5, 5)).unwrap();
        assert_eq!(g.paint(&p(4, 4, 2, 2)), Err(LayoutError::Overlap("p".into())));
        assert_eq!(g.paint(&p(8, 8, 3, 3)), Err(LayoutError::OutOfBounds("p".into())));
        assert!(g.is_free(0, 5, 5, 5));
        assert!(!g.is_free(0, 4, 5, 5));
        assert_eq!(g.first_fit(5, 5), Some((0, 5)));
        assert_eq!(g.first_fit(5, 10), Some((5, 0)));
        assert_eq!(g.first_fit(6, 10), None);
        assert_eq!(g.first_fit(7, 6), None);
    }
}
