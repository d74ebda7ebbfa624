// Packs three weighted features onto a 128x128 canvas and draws the result.

use std::error::Error;

use dwtm::association::{AssociationMethod, AssociationScore, WeightTable};
use dwtm::layout::{compute_boxes, insert_boxes, CanvasConfig, Layout};

pub fn run_example() -> Result<Layout, Box<dyn Error>> {
    let scores = [("f1", 0.5), ("f2", 0.3), ("f3", 0.2)]
        .iter()
        .map(|(name, r)| AssociationScore::new(*name, AssociationMethod::Pearson, *r))
        .collect();
    let weights = WeightTable::from_scores(scores)?;
    let canvas = CanvasConfig::new(128, 128)?;
    let boxes = compute_boxes(&weights, &[2, 3, 4], canvas)?;
    for b in &boxes {
        println!("{}: target {:.1}, box {}x{}", b.feature, b.target_area, b.height, b.length);
    }
    let layout = insert_boxes(boxes, canvas);
    for p in &layout.placements {
        println!("{} at ({}, {}) size {}x{} after {} trims", p.feature, p.row, p.col, p.height, p.length, p.trims);
    }

    // One character per 8x8 block.
    for r in (0..canvas.height).step_by(8) {
        let line: String = (0..canvas.width)
            .step_by(8)
            .map(|c| match layout.placements.iter().position(|p| p.contains(r, c)) {
                Some(i) => char::from(b'1' + i as u8),
                None => '.',
            })
            .collect();
        println!("{line}");
    }
    Ok(layout)
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
