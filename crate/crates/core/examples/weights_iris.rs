// Scores the Iris features against the species label.

use std::error::Error;
use std::fs::File;
use std::path::Path;

use dwtm::ingest::{load_csv, IngestOptions, ParseOptions};

pub fn run_example() -> Result<Vec<(String, f64)>, Box<dyn Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
    let dataset = load_csv(File::open(path)?, "species", &ParseOptions::default(), &IngestOptions::default())?;
    let weights = dwtm::compute_weights(&dataset)?;
    print!("{}", dwtm::pipeline::weight_table_text(&weights));
    Ok(weights.iter().map(|(name, w)| (name.to_owned(), w)).collect())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
