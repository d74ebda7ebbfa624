//! Feature-to-label association scores and their normalization into weights.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Column, Dataset};

#[derive(Debug, Error, PartialEq)]
pub enum AssociationError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("zero variance; the feature carries no signal")]
    ZeroVariance,
    #[error("contingency table must be at least 2x2, got {rows}x{cols}")]
    TableTooSmall { rows: usize, cols: usize },
    #[error("contingency table rows have unequal lengths")]
    RaggedTable,
    #[error("contingency table has an empty row or column")]
    EmptyMargin,
    #[error("dataset has no features")]
    NoFeatures,
    #[error("need at least 2 distinct labels, found {0}")]
    TooFewClasses(usize),
    #[error("every feature has zero association with the label")]
    NoSignal,
}

impl AssociationError {
    /// Errors that mean "this feature is constant", as opposed to misuse.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            AssociationError::ZeroVariance
                | AssociationError::TableTooSmall { .. }
                | AssociationError::EmptyMargin
        )
    }
}

pub type Result<T, E = AssociationError> = std::result::Result<T, E>;

/// Pearson product-moment correlation, accumulated in a single pass over
/// running means and co-moments.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(AssociationError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AssociationError::TooFewObservations(x.len()));
    }
    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2_x, mut m2_y, mut c_xy) = (0.0, 0.0, 0.0);
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (i + 1) as f64;
        let dx = a - mean_x;
        let dy = b - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        m2_x += dx * (a - mean_x);
        m2_y += dy * (b - mean_y);
        c_xy += dx * (b - mean_y);
    }
    if m2_x <= 0.0 || m2_y <= 0.0 {
        return Err(AssociationError::ZeroVariance);
    }
    Ok((c_xy / (m2_x * m2_y).sqrt()).clamp(-1.0, 1.0))
}

/// Row-major table of non-negative counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(AssociationError::RaggedTable);
        }
        Ok(ContingencyTable {
            rows: rows.len(),
            cols,
            counts: rows.into_iter().flatten().collect(),
        })
    }

    /// Cross-tabulates two paired category sequences. Categories are indexed
    /// by first appearance, so no row or column is ever empty.
    pub fn from_pairs<A, B>(a: &[A], b: &[B]) -> Result<Self>
    where
        A: Eq + std::hash::Hash,
        B: Eq + std::hash::Hash,
    {
        if a.len() != b.len() {
            return Err(AssociationError::LengthMismatch(a.len(), b.len()));
        }
        let (mut ra, mut rb) = (HashMap::new(), HashMap::new());
        let pairs: Vec<(usize, usize)> = a
            .iter()
            .zip(b)
            .map(|(x, y)| (first_seen_index(&mut ra, x), first_seen_index(&mut rb, y)))
            .collect();
        let (rows, cols) = (ra.len(), rb.len());
        let mut counts = vec![0u64; rows * cols];
        for (i, j) in pairs {
            counts[i * cols + j] += 1;
        }
        Ok(ContingencyTable { rows, cols, counts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn margins(&self) -> (Vec<u64>, Vec<u64>) {
        let mut row_totals = vec![0u64; self.rows];
        let mut col_totals = vec![0u64; self.cols];
        for (row, total) in self.counts.chunks(self.cols).zip(&mut row_totals) {
            for (&v, col) in row.iter().zip(&mut col_totals) {
                *total += v;
                *col += v;
            }
        }
        (row_totals, col_totals)
    }
}

fn first_seen_index<K: Eq + std::hash::Hash>(seen: &mut HashMap<K, usize>, key: K) -> usize {
    let next = seen.len();
    *seen.entry(key).or_insert(next)
}

/// Pearson's chi-square statistic of independence, without continuity correction.
pub fn chi_square(table: &ContingencyTable) -> Result<f64> {
    if table.rows < 2 || table.cols < 2 {
        return Err(AssociationError::TableTooSmall {
            rows: table.rows,
            cols: table.cols,
        });
    }
    let (row_totals, col_totals) = table.margins();
    if row_totals.contains(&0) || col_totals.contains(&0) {
        return Err(AssociationError::EmptyMargin);
    }
    let grand = table.total() as f64;
    let mut stat = 0.0;
    for (r, &rt) in row_totals.iter().enumerate() {
        for (c, &ct) in col_totals.iter().enumerate() {
            let expected = rt as f64 * ct as f64 / grand;
            let diff = table.get(r, c) as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    Ok(stat)
}

/// Cramér's V, in `[0, 1]`.
pub fn cramers_v(table: &ContingencyTable) -> Result<f64> {
    let chi2 = chi_square(table)?;
    let n = table.total() as f64;
    let k = table.rows.min(table.cols) as f64 - 1.0;
    Ok((chi2 / (n * k)).sqrt().clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociationMethod {
    Pearson,
    CramersV,
}

impl std::fmt::Display for AssociationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AssociationMethod::Pearson => "pearson",
            AssociationMethod::CramersV => "cramers_v",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationScore {
    pub feature: String,
    pub method: AssociationMethod,
    /// Signed r for Pearson, V for Cramér's V.
    pub raw: f64,
    /// `|raw|`.
    pub magnitude: f64,
    /// Set when the feature was constant and scored as zero.
    pub degenerate: bool,
}

impl AssociationScore {
    pub fn new(feature: impl Into<String>, method: AssociationMethod, raw: f64) -> Self {
        AssociationScore {
            feature: feature.into(),
            method,
            raw,
            magnitude: raw.abs(),
            degenerate: false,
        }
    }

    pub fn degenerate(feature: impl Into<String>, method: AssociationMethod) -> Self {
        AssociationScore {
            degenerate: true,
            ..AssociationScore::new(feature, method, 0.0)
        }
    }
}

/// Normalized feature weights: `weight_i = magnitude_i / Σ magnitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub scores: Vec<AssociationScore>,
    pub total: f64,
    pub weights: Vec<f64>,
}

impl WeightTable {
    pub fn from_scores(scores: Vec<AssociationScore>) -> Result<Self> {
        if scores.is_empty() {
            return Err(AssociationError::NoFeatures);
        }
        let total: f64 = scores.iter().map(|s| s.magnitude).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(AssociationError::NoSignal);
        }
        let weights = scores.iter().map(|s| s.magnitude / total).collect();
        Ok(WeightTable { scores, total, weights })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn weight_of(&self, feature: &str) -> Option<f64> {
        self.scores
            .iter()
            .position(|s| s.feature == feature)
            .map(|i| self.weights[i])
    }

    /// `(feature, weight)` pairs in schema order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|s| s.feature.as_str()).zip(self.weights.iter().copied())
    }
}

/// Scores one feature column against integer-encoded labels.
///
/// Implement this to plug in another association measure; [`DefaultScorer`]
/// covers numeric and categorical columns.
pub trait FeatureScorer: Sync {
    fn score(&self, feature: &str, column: &Column, labels: &[usize]) -> Result<AssociationScore>;
}

/// Pearson r against the class index for numeric columns, Cramér's V of the
/// feature × label table for categorical ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultScorer;

impl FeatureScorer for DefaultScorer {
    fn score(&self, feature: &str, column: &Column, labels: &[usize]) -> Result<AssociationScore> {
        let (method, raw) = match column {
            Column::Numeric(values) => {
                let encoded: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
                (AssociationMethod::Pearson, pearson_r(values, &encoded))
            }
            Column::Categorical(values) => {
                let table = ContingencyTable::from_pairs(values, labels)?;
                (AssociationMethod::CramersV, cramers_v(&table))
            }
        };
        match raw {
            Ok(r) => Ok(AssociationScore::new(feature, method, r)),
            Err(e) if e.is_degenerate() => {
                log::warn!("feature `{feature}` is degenerate ({e}); weight 0");
                Ok(AssociationScore::degenerate(feature, method))
            }
            Err(e) => Err(e),
        }
    }
}

pub fn compute_weights(dataset: &Dataset) -> Result<WeightTable> {
    compute_weights_with(dataset, &DefaultScorer)
}

/// Scores every feature (in parallel) and normalizes in schema order.
pub fn compute_weights_with(dataset: &Dataset, scorer: &dyn FeatureScorer) -> Result<WeightTable> {
    if dataset.columns().is_empty() {
        return Err(AssociationError::NoFeatures);
    }
    let classes = dataset.distinct_labels();
    if classes < 2 {
        return Err(AssociationError::TooFewClasses(classes));
    }
    let labels = dataset.labels();
    let columns: Vec<(&String, &Column)> = dataset.columns().iter().collect();
    let scores = columns
        .par_iter()
        .map(|(name, col)| scorer.score(name, col, labels))
        .collect::<Result<Vec<_>>>()?;
    WeightTable::from_scores(scores)
}
