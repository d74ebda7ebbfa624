// Renders the first Iris row and prints it as ASCII art.

use std::error::Error;
use std::fs::File;
use std::path::Path;

use dwtm::ingest::{load_csv, IngestOptions, ParseOptions};
use dwtm::pipeline::build_manifest;
use dwtm::render::render_row;
use dwtm::{CanvasConfig, RenderConfig, RenderJob};

pub fn run_example() -> Result<image::GrayImage, Box<dyn Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
    let dataset = load_csv(File::open(path)?, "species", &ParseOptions::default(), &IngestOptions::default())?;
    let canvas = CanvasConfig::new(64, 64)?;
    let layout = build_manifest(&dataset, canvas)?.layout()?;
    let job = RenderJob::from_dataset(&dataset, 0, &layout)?;
    println!("row 0 ({}): {:?}", dataset.label_name(job.label), job.values);

    let img = render_row(&job, &RenderConfig::new(canvas))?;
    for y in (0..img.height()).step_by(2) {
        let line: String = (0..img.width()).map(|x| if img.get_pixel(x, y)[0] > 0 { '#' } else { ' ' }).collect();
        println!("{}", line.trim_end());
    }
    Ok(img)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
