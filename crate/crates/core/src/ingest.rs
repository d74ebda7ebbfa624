//! CSV ingestion: raw parsing, schema inference, and materialization into a
//! typed column store.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::render::{format_value, shortest_decimal};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input contains no data rows")]
    EmptyTable,
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("target column `{0}` not found")]
    MissingTarget(String),
    #[error("column `{0}` named in overrides does not exist")]
    UnknownColumn(String),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` has no non-missing values")]
    AllMissing(String),
    #[error("schema has no features besides the target")]
    NoFeatures,
    #[error("target column has no labels")]
    NoLabels,
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("line {line}, column `{column}`: missing value")]
    MissingValue { line: u64, column: String },
    #[error("line {line}, column `{column}`: `{cell}` is not a finite number")]
    InvalidNumber {
        line: u64,
        column: String,
        cell: String,
    },
    #[error("line {line}: label `{label}` is not among the schema's class labels")]
    UnknownLabel { line: u64, label: String },
    #[error("no rows remain after dropping rows with missing values")]
    NoRowsRemain,
    #[error("dataset: {0}")]
    Inconsistent(String),
}

impl IngestError {
    /// True for errors raised while reading the CSV itself, as opposed to
    /// schema or content errors.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            IngestError::EmptyTable | IngestError::RaggedRow { .. } | IngestError::Csv(_)
        )
    }
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

/// One input column: its name, kind and the widest rendered value in characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub max_chars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<FeatureSpec>,
    pub target: String,
    /// Distinct labels in order of first appearance.
    pub class_labels: Vec<String>,
}

impl Schema {
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for f in &self.features {
            if f.max_chars == 0 {
                return Err(IngestError::InvalidSchema(format!(
                    "feature `{}` has max_chars 0",
                    f.name
                )));
            }
            if f.name == self.target {
                return Err(IngestError::InvalidSchema(format!(
                    "target `{}` is also listed as a feature",
                    f.name
                )));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(IngestError::DuplicateColumn(f.name.clone()));
            }
        }
        if self.class_labels.is_empty() {
            return Err(IngestError::NoLabels);
        }
        let mut labels = HashSet::new();
        for l in &self.class_labels {
            if !labels.insert(l.as_str()) {
                return Err(IngestError::InvalidSchema(format!("duplicate class label `{l}`")));
            }
        }
        Ok(())
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Column::Numeric(_) => FeatureKind::Numeric,
            Column::Categorical(_) => FeatureKind::Categorical,
        }
    }

    pub fn get(&self, row: usize) -> Option<Value<'_>> {
        match self {
            Column::Numeric(v) => v.get(row).map(|x| Value::Numeric(*x)),
            Column::Categorical(v) => v.get(row).map(|s| Value::Categorical(s)),
        }
    }
}

/// A single materialized cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<'a> {
    Numeric(f64),
    Categorical(&'a str),
}

/// Immutable typed column store. Row `i` of every column and `labels[i]`
/// belong to the same record.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    columns: IndexMap<String, Column>,
    labels: Vec<usize>,
    row_count: usize,
}

impl Dataset {
    /// Builds a dataset, checking column lengths, kinds and label indices.
    /// Each feature's `max_chars` is recomputed from the data.
    pub fn new(mut schema: Schema, columns: IndexMap<String, Column>, labels: Vec<usize>) -> Result<Self> {
        schema.validate()?;
        let row_count = labels.len();
        if columns.len() != schema.features.len() {
            return Err(IngestError::Inconsistent(format!(
                "{} columns for {} features",
                columns.len(),
                schema.features.len()
            )));
        }
        let mut ordered = IndexMap::with_capacity(columns.len());
        let mut columns = columns;
        for spec in &mut schema.features {
            let col = columns
                .swap_remove(&spec.name)
                .ok_or_else(|| IngestError::Inconsistent(format!("no column for feature `{}`", spec.name)))?;
            if col.kind() != spec.kind {
                return Err(IngestError::Inconsistent(format!(
                    "column `{}` holds {:?} values but is declared {:?}",
                    spec.name,
                    col.kind(),
                    spec.kind
                )));
            }
            if col.len() != row_count {
                return Err(IngestError::Inconsistent(format!(
                    "column `{}` has {} entries, expected {row_count}",
                    spec.name,
                    col.len()
                )));
            }
            if let Column::Numeric(v) = &col {
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(IngestError::Inconsistent(format!(
                        "column `{}` contains non-finite value {bad}",
                        spec.name
                    )));
                }
            }
            spec.max_chars = observed_max_chars(&col);
            ordered.insert(spec.name.clone(), col);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= schema.class_labels.len()) {
            return Err(IngestError::Inconsistent(format!(
                "label index {bad} out of range for {} classes",
                schema.class_labels.len()
            )));
        }
        Ok(Dataset {
            schema,
            columns: ordered,
            labels,
            row_count,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Columns in schema feature order.
    pub fn columns(&self) -> &IndexMap<String, Column> {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.get(name)
    }

    /// Class index per row, into `schema().class_labels`.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn label_name(&self, row: usize) -> &str {
        &self.schema.class_labels[self.labels[row]]
    }

    /// Number of distinct labels that actually occur.
    pub fn distinct_labels(&self) -> usize {
        self.labels.iter().collect::<HashSet<_>>().len()
    }

    /// Writes the dataset back out as CSV: features in schema order, then the target.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.schema.features.iter().map(|f| f.name.as_str()).collect();
        header.push(&self.schema.target);
        w.write_record(&header)?;
        for row in 0..self.row_count {
            let mut record: Vec<String> = self
                .columns
                .values()
                .map(|c| match c.get(row).expect("row in range") {
                    Value::Numeric(x) => shortest_decimal(x),
                    Value::Categorical(s) => s.to_owned(),
                })
                .collect();
            record.push(self.label_name(row).to_owned());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }
}

fn observed_max_chars(col: &Column) -> usize {
    let widest = match col {
        Column::Numeric(v) => v.iter().map(|x| shortest_decimal(*x).chars().count()).max(),
        Column::Categorical(v) => v.iter().map(|s| s.chars().count()).max(),
    };
    widest.unwrap_or(0).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: b',',
            has_header: true,
        }
    }
}

/// Rows of text cells, all of equal arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    /// Column names; generated as `column_1..` when the input has no header.
    pub header: Vec<String>,
    pub has_header: bool,
    pub rows: Vec<Vec<String>>,
    /// 1-based source line of each row, for error messages.
    pub lines: Vec<u64>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Parses CSV with RFC 4180 quoting. Cells are trimmed of surrounding whitespace.
pub fn parse_csv<R: Read>(source: R, options: &ParseOptions) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(options.delimiter)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut arity = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let expected = *arity.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IngestError::RaggedRow {
                line,
                expected,
                found: record.len(),
            });
        }
        let cells: Vec<String> = record.iter().map(str::to_owned).collect();
        if options.has_header && header.is_none() {
            header = Some(cells);
        } else {
            rows.push(cells);
            lines.push(line);
        }
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    let has_header = header.is_some();
    let header = header.unwrap_or_else(|| (1..=arity.unwrap_or(0)).map(|i| format!("column_{i}")).collect());
    Ok(RawTable {
        header,
        has_header,
        rows,
        lines,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    #[default]
    Drop,
    Error,
}

/// Options shared by [`infer_schema`] and [`materialize`].
#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    /// Forced kinds, by column name.
    pub kinds: BTreeMap<String, FeatureKind>,
    pub missing: MissingPolicy,
    /// Cells equal to one of these (after trimming) count as missing.
    pub missing_tokens: Vec<String>,
    /// Label rewrites applied to the target column before class mapping.
    pub collapse_labels: BTreeMap<String, String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            kinds: BTreeMap::new(),
            missing: MissingPolicy::Drop,
            missing_tokens: ["", "?", "NA", "N/A", "NaN"].iter().map(|s| s.to_string()).collect(),
            collapse_labels: BTreeMap::new(),
        }
    }
}

impl IngestOptions {
    fn is_missing(&self, cell: &str) -> bool {
        self.missing_tokens.iter().any(|t| t == cell)
    }

    fn collapse<'a>(&'a self, label: &'a str) -> &'a str {
        self.collapse_labels.get(label).map_or(label, String::as_str)
    }
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Infers a schema from the raw table.
///
/// A column is numeric iff every non-missing cell parses as a finite number;
/// `options.kinds` overrides the inference. `max_chars` is the widest
/// rendered value over non-missing cells; [`materialize`] narrows it to the
/// rows that survive.
pub fn infer_schema(raw: &RawTable, target: &str, options: &IngestOptions) -> Result<Schema> {
    let mut seen = HashSet::new();
    for name in &raw.header {
        if !seen.insert(name.as_str()) {
            return Err(IngestError::DuplicateColumn(name.clone()));
        }
    }
    let target_idx = raw
        .column_index(target)
        .ok_or_else(|| IngestError::MissingTarget(target.to_owned()))?;
    if let Some(unknown) = options.kinds.keys().find(|k| raw.column_index(k).is_none()) {
        return Err(IngestError::UnknownColumn(unknown.clone()));
    }

    let mut features = Vec::new();
    for (idx, name) in raw.header.iter().enumerate() {
        if idx == target_idx {
            continue;
        }
        let cells: Vec<&str> = raw
            .rows
            .iter()
            .map(|r| r[idx].as_str())
            .filter(|c| !options.is_missing(c))
            .collect();
        if cells.is_empty() {
            return Err(IngestError::AllMissing(name.clone()));
        }
        let kind = options.kinds.get(name).copied().unwrap_or_else(|| {
            if cells.iter().all(|c| parse_finite(c).is_some()) {
                FeatureKind::Numeric
            } else {
                FeatureKind::Categorical
            }
        });
        let max_chars = cells
            .iter()
            .map(|c| match kind {
                FeatureKind::Numeric => parse_finite(c).map_or(0, |x| shortest_decimal(x).chars().count()),
                FeatureKind::Categorical => c.chars().count(),
            })
            .max()
            .unwrap_or(1)
            .max(1);
        features.push(FeatureSpec {
            name: name.clone(),
            kind,
            max_chars,
        });
    }
    if features.is_empty() {
        return Err(IngestError::NoFeatures);
    }

    let mut class_labels: Vec<String> = Vec::new();
    for row in &raw.rows {
        let cell = row[target_idx].as_str();
        if options.is_missing(cell) {
            continue;
        }
        let label = options.collapse(cell);
        if !class_labels.iter().any(|l| l == label) {
            class_labels.push(label.to_owned());
        }
    }
    if class_labels.is_empty() {
        return Err(IngestError::AllMissing(target.to_owned()));
    }

    Ok(Schema {
        features,
        target: target.to_owned(),
        class_labels,
    })
}

/// Converts raw cells into typed columns.
///
/// Rows with a missing or unparseable cell are dropped under
/// [`MissingPolicy::Drop`] and rejected under [`MissingPolicy::Error`]. Class
/// labels that no longer occur after dropping are removed; the remaining ones
/// keep their first-appearance order.
pub fn materialize(raw: &RawTable, schema: &Schema, options: &IngestOptions) -> Result<Dataset> {
    schema.validate()?;
    let target_idx = raw
        .column_index(&schema.target)
        .ok_or_else(|| IngestError::MissingTarget(schema.target.clone()))?;
    let feature_idx: Vec<usize> = schema
        .features
        .iter()
        .map(|f| raw.column_index(&f.name).ok_or_else(|| IngestError::UnknownColumn(f.name.clone())))
        .collect::<Result<_>>()?;
    let label_index: HashMap<&str, usize> = schema
        .class_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let mut numeric: Vec<Vec<f64>> = vec![Vec::new(); schema.features.len()];
    let mut categorical: Vec<Vec<String>> = vec![Vec::new(); schema.features.len()];
    let mut labels = Vec::new();
    let mut dropped = 0usize;

    'rows: for (row, &line) in raw.rows.iter().zip(&raw.lines) {
        let mut parsed = Vec::with_capacity(feature_idx.len());
        for (spec, &idx) in schema.features.iter().zip(&feature_idx) {
            let cell = row[idx].as_str();
            if options.is_missing(cell) {
                match options.missing {
                    MissingPolicy::Drop => {
                        dropped += 1;
                        continue 'rows;
                    }
                    MissingPolicy::Error => {
                        return Err(IngestError::MissingValue {
                            line,
                            column: spec.name.clone(),
                        })
                    }
                }
            }
            match spec.kind {
                FeatureKind::Numeric => match parse_finite(cell) {
                    Some(x) => parsed.push(Value::Numeric(x)),
                    None => match options.missing {
                        MissingPolicy::Drop => {
                            log::warn!("line {line}: dropping row, `{cell}` in `{}` is not numeric", spec.name);
                            dropped += 1;
                            continue 'rows;
                        }
                        MissingPolicy::Error => {
                            return Err(IngestError::InvalidNumber {
                                line,
                                column: spec.name.clone(),
                                cell: cell.to_owned(),
                            })
                        }
                    },
                },
                FeatureKind::Categorical => parsed.push(Value::Categorical(cell)),
            }
        }
        let cell = row[target_idx].as_str();
        if options.is_missing(cell) {
            match options.missing {
                MissingPolicy::Drop => {
                    dropped += 1;
                    continue 'rows;
                }
                MissingPolicy::Error => {
                    return Err(IngestError::MissingValue {
                        line,
                        column: schema.target.clone(),
                    })
                }
            }
        }
        let label = options.collapse(cell);
        let class = *label_index.get(label).ok_or_else(|| IngestError::UnknownLabel {
            line,
            label: label.to_owned(),
        })?;

        for (i, value) in parsed.into_iter().enumerate() {
            match value {
                Value::Numeric(x) => numeric[i].push(x),
                Value::Categorical(s) => categorical[i].push(s.to_owned()),
            }
        }
        labels.push(class);
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} row(s) with missing or invalid values");
    }
    if labels.is_empty() {
        return Err(IngestError::NoRowsRemain);
    }

    // Re-index labels over the classes that survived, keeping first-appearance order.
    let mut remap = vec![usize::MAX; schema.class_labels.len()];
    let mut class_labels = Vec::new();
    for &l in &labels {
        if remap[l] == usize::MAX {
            remap[l] = class_labels.len();
            class_labels.push(schema.class_labels[l].clone());
        }
    }
    let labels = labels.into_iter().map(|l| remap[l]).collect();

    let mut columns = IndexMap::with_capacity(schema.features.len());
    for (i, spec) in schema.features.iter().enumerate() {
        let col = match spec.kind {
            FeatureKind::Numeric => Column::Numeric(std::mem::take(&mut numeric[i])),
            FeatureKind::Categorical => Column::Categorical(std::mem::take(&mut categorical[i])),
        };
        columns.insert(spec.name.clone(), col);
    }
    let schema = Schema {
        features: schema.features.clone(),
        target: schema.target.clone(),
        class_labels,
    };
    Dataset::new(schema, columns, labels)
}

/// Parse, infer and materialize in one step.
pub fn load_csv<R: Read>(source: R, target: &str, parse: &ParseOptions, options: &IngestOptions) -> Result<Dataset> {
    let raw = parse_csv(source, parse)?;
    let schema = infer_schema(&raw, target, options)?;
    materialize(&raw, &schema, options)
}

/// Checks that each feature's `max_chars` equals the widest formatted value.
pub fn check_max_chars(dataset: &Dataset) -> bool {
    dataset.schema().features.iter().all(|spec| {
        let col = &dataset.columns()[&spec.name];
        let widest = (0..dataset.row_count())
            .filter_map(|r| format_value(col.get(r)?, spec).ok())
            .map(|s| s.chars().count())
            .max()
            .unwrap_or(1);
        widest == spec.max_chars
    })
}
