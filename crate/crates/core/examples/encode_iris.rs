// Encodes the whole Iris dataset into a train/test image tree.

use std::error::Error;

use dwtm::pipeline::{cmd_encode, ConfigLayer, PipelineConfig};
use dwtm::Manifest;

pub fn run_example() -> Result<Manifest, Box<dyn Error>> {
    let out = tempfile::tempdir()?;
    let config = PipelineConfig::resolve([ConfigLayer {
        input: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/data/iris.csv").into()),
        target: Some("species".into()),
        seed: Some(7),
        out: Some(out.path().to_path_buf()),
        ..Default::default()
    }])?;
    let manifest = cmd_encode(&config)?;
    let files = manifest.files.as_deref().unwrap_or_default();
    let train = files.iter().filter(|f| f.split == dwtm::render::Split::Train).count();
    println!("wrote {} images to {} ({} train, {} test)", files.len(), out.path().display(), train, files.len() - train);
    for f in files.iter().take(3) {
        println!("  {}", f.path);
    }
    Ok(manifest)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
