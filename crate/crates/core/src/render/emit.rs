//! Writes a rendered, split, class-labeled image tree.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{render_row, RenderConfig, RenderError, RenderJob, Result};
use crate::ingest::Dataset;
use crate::manifest::{FileRecord, Manifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Fraction of rows assigned to the training split, in `(0, 1]`.
    pub fraction: f64,
    pub seed: u64,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(RenderError::InvalidSplit(self.fraction));
        }
        Ok(())
    }

    /// `round(fraction * rows)` rows go to training.
    pub fn train_count(&self, rows: usize) -> usize {
        ((self.fraction * rows as f64).round() as usize).min(rows)
    }
}

/// Assigns each row to a split. Rows are shuffled by a ChaCha8 generator
/// seeded with `config.seed`; the first `train_count` shuffled rows train.
pub fn split_rows(rows: usize, config: &SplitConfig) -> Result<Vec<Split>> {
    config.validate()?;
    let mut order: Vec<usize> = (0..rows).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    order.shuffle(&mut rng);
    let mut splits = vec![Split::Test; rows];
    for &row in &order[..config.train_count(rows)] {
        splits[row] = Split::Train;
    }
    Ok(splits)
}

/// Makes a label safe to use as a single path component.
pub fn sanitize_label(label: &str) -> String {
    let cleaned: String = label
        .chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if cleaned.is_empty() || cleaned.chars().all(|c| c == '.') {
        format!("_{cleaned}")
    } else {
        cleaned
    }
}

fn label_dirs(labels: &[String]) -> Vec<String> {
    let mut used = HashSet::new();
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut name = sanitize_label(l);
            if !used.insert(name.clone()) {
                name = format!("{name}_{i}");
                used.insert(name.clone());
            }
            name
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RenderError + '_ {
    move |source| RenderError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Clears the split directories of a previous run. Refuses to touch them
/// unless a manifest marks the directory as ours.
fn prepare_out_dir(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let previous_run = out_dir.join("manifest.json").is_file();
    for split in [Split::Train, Split::Test] {
        let dir = out_dir.join(split.dir_name());
        if dir.exists() {
            if !previous_run {
                return Err(RenderError::OutputNotEmpty(out_dir.to_owned()));
            }
            fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
        }
    }
    Ok(())
}

/// Renders every row of `dataset` against the manifest's layout and writes
/// `<out_dir>/<split>/<label>/<row_index>.png` plus `<out_dir>/manifest.json`.
///
/// Every class gets a directory under both splits, even when empty. The
/// returned manifest is the input manifest with `files` filled in row order.
pub fn emit_dataset(
    dataset: &Dataset,
    manifest: &Manifest,
    config: &RenderConfig,
    split: &SplitConfig,
    out_dir: &Path,
) -> Result<Manifest> {
    config.validate()?;
    let layout = manifest.layout()?;
    let splits = split_rows(dataset.row_count(), split)?;
    prepare_out_dir(out_dir)?;

    let dirs = label_dirs(&dataset.schema().class_labels);
    for s in [Split::Train, Split::Test] {
        for d in &dirs {
            let dir = out_dir.join(s.dir_name()).join(d);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
    }

    let records: Vec<FileRecord> = (0..dataset.row_count())
        .map(|row| FileRecord {
            path: format!("{}/{}/{row}.png", splits[row].dir_name(), dirs[dataset.labels()[row]]),
            row_index: row,
            label: dataset.label_name(row).to_owned(),
            split: splits[row],
        })
        .collect();

    records.par_iter().try_for_each(|rec| -> Result<()> {
        let job = RenderJob::from_dataset(dataset, rec.row_index, &layout)?;
        let img = render_row(&job, config)?;
        let path: PathBuf = out_dir.join(&rec.path);
        img.save_with_format(&path, image::ImageFormat::Png)
            .map_err(|source| RenderError::Image { path, source })
    })?;

    let mut out = manifest.clone();
    out.files = Some(records);
    out.write(&out_dir.join("manifest.json"))?;
    Ok(out)
}
