// Runs the layout stage on its own, saves the manifest, and renders from the
// reloaded copy.

use std::error::Error;

use dwtm::pipeline::{build_manifest, load_dataset, ConfigLayer, PipelineConfig};
use dwtm::render::{emit_dataset, SplitConfig};
use dwtm::{CanvasConfig, Manifest, RenderConfig};

pub fn run_example() -> Result<Manifest, Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let config = PipelineConfig::resolve([ConfigLayer {
        input: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/data/iris.csv").into()),
        target: Some("species".into()),
        ..Default::default()
    }])?;
    let dataset = load_dataset(&config)?;
    let canvas = CanvasConfig::new(96, 48)?;

    let path = dir.path().join("layout.json");
    build_manifest(&dataset, canvas)?.write(&path)?;
    let manifest = Manifest::read(&path)?;
    println!("{}", manifest.to_json());

    let split = SplitConfig { fraction: 0.5, seed: 1 };
    let out = emit_dataset(&dataset, &manifest, &RenderConfig::new(canvas), &split, &dir.path().join("images"))?;
    println!("rendered {} images", out.files.as_ref().map_or(0, Vec::len));
    Ok(out)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
