mod common;

use common::fuzz;
use common::oracle::{naive_height, naive_pack, NaiveBox};
use dwtm::association::{AssociationMethod, AssociationScore, WeightTable};
use dwtm::layout::{compute_boxes, insert_boxes, CanvasConfig, Layout};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn three_weights() -> WeightTable {
    WeightTable::from_scores(
        [0.5, 0.3, 0.2]
            .iter()
            .enumerate()
            .map(|(i, w)| AssociationScore::new(format!("f{}", i + 1), AssociationMethod::Pearson, *w))
            .collect(),
    )
    .unwrap()
}

fn naive_boxes(weights: &WeightTable, chars: &[usize], canvas: CanvasConfig) -> Vec<NaiveBox> {
    weights
        .iter()
        .zip(chars)
        .enumerate()
        .filter(|(_, ((_, w), _))| *w > 0.0)
        .map(|(order, ((name, w), &c))| NaiveBox {
            name: name.to_owned(),
            order,
            weight: w,
            chars: c as u64,
            height: naive_height(w, c as u64, canvas.width as u64, canvas.height as u64),
            trims: 0,
        })
        .collect()
}

/// Paints every placement into a write counter; returns true when no pixel
/// is written twice and every box is in bounds.
fn disjoint_and_in_bounds(layout: &Layout) -> bool {
    let (w, h) = (layout.canvas.width as usize, layout.canvas.height as usize);
    let mut writes = vec![0u8; w * h];
    for p in &layout.placements {
        if (p.row + p.height) as usize > h || (p.col + p.length) as usize > w {
            return false;
        }
        for r in p.row..p.row + p.height {
            for c in p.col..p.col + p.length {
                let cell = &mut writes[r as usize * w + c as usize];
                *cell += 1;
                if *cell > 1 {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn worked_example_matches_exhaustive_oracle() {
    let canvas = CanvasConfig::new(128, 128).unwrap();
    let weights = three_weights();
    let (placed, dropped) = naive_pack(naive_boxes(&weights, &[2, 3, 4], canvas), 128, 128);
    // Frozen from the oracle run.
    assert_eq!(
        placed,
        vec![
            ("f1".into(), 0, 0, 64, 128, 0),
            ("f2".into(), 64, 0, 40, 120, 0),
            ("f3".into(), 104, 0, 24, 96, 4),
        ]
    );
    assert!(dropped.is_empty());

    let layout = insert_boxes(compute_boxes(&weights, &[2, 3, 4], canvas).unwrap(), canvas);
    let got: Vec<_> = layout
        .placements
        .iter()
        .map(|p| (p.feature.clone(), p.row as u64, p.col as u64, p.height as u64, p.length as u64, p.trims as u64))
        .collect();
    assert_eq!(got, placed);
}

#[test]
fn box_sizes_from_weights() {
    let canvas = CanvasConfig::new(128, 128).unwrap();
    for (w, c, h) in [(0.5, 2, 64), (0.3, 3, 40), (0.2, 4, 28)] {
        assert_eq!(naive_height(w, c, 128, 128), h);
    }
    let boxes = compute_boxes(&three_weights(), &[2, 3, 4], canvas).unwrap();
    let got: Vec<_> = boxes.iter().map(|b| (b.height, b.length)).collect();
    assert_eq!(got, vec![(64, 128), (40, 120), (28, 112)]);
}

#[test]
fn overfull_canvas_drops_features() {
    let canvas = CanvasConfig::new(8, 8).unwrap();
    let weights = WeightTable::from_scores(
        (0..6)
            .map(|i| AssociationScore::new(format!("w{i}"), AssociationMethod::Pearson, 1.0))
            .collect(),
    )
    .unwrap();
    let layout = insert_boxes(compute_boxes(&weights, &[9; 6], canvas).unwrap(), canvas);
    assert_eq!(layout.placements.len() + layout.dropped.len(), 6);
    assert!(!layout.dropped.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_exhaustive_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = fuzz::instance(&mut rng, 1..=8, 1..=6, 16..=48);
        let layout = insert_boxes(compute_boxes(&inst.weights, &inst.chars, inst.canvas).unwrap(), inst.canvas);
        let (placed, dropped) = naive_pack(
            naive_boxes(&inst.weights, &inst.chars, inst.canvas),
            inst.canvas.width as u64,
            inst.canvas.height as u64,
        );
        let got: Vec<_> = layout
            .placements
            .iter()
            .map(|p| (p.feature.clone(), p.row as u64, p.col as u64, p.height as u64, p.length as u64, p.trims as u64))
            .collect();
        prop_assert_eq!(got, placed);
        prop_assert_eq!(layout.dropped, dropped);
    }

    #[test]
    fn box_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = fuzz::instance(&mut rng, 2..=30, 1..=12, 32..=256);
        let boxes = compute_boxes(&inst.weights, &inst.chars, inst.canvas).unwrap();
        for b in &boxes {
            prop_assert_eq!(b.length, b.height * b.chars);
            let realized = b.area() as f64;
            prop_assert!(realized <= b.target_area);
            if b.initial_height >= 2 {
                prop_assert!(realized >= b.target_area * (1.0 - 2.0 / b.initial_height as f64));
            }
        }
        // Attempt order is non-increasing in area.
        prop_assert!(boxes.windows(2).all(|w| w[0].area() >= w[1].area()));
        // Heavier weight never yields a smaller box at equal width.
        for a in &boxes {
            for b in &boxes {
                if a.chars == b.chars && a.weight > b.weight {
                    prop_assert!(a.area() >= b.area());
                }
            }
        }
    }

    #[test]
    fn layout_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = fuzz::instance(&mut rng, 2..=30, 1..=12, 32..=128);
        let boxes = compute_boxes(&inst.weights, &inst.chars, inst.canvas).unwrap();
        let initial: u64 = boxes.iter().map(|b| b.height as u64).sum();
        let layout = insert_boxes(boxes.clone(), inst.canvas);
        prop_assert!(disjoint_and_in_bounds(&layout));
        let trims: u64 = layout.placements.iter().map(|p| p.trims as u64).sum();
        prop_assert!(trims <= initial);
        prop_assert_eq!(layout.placements.len() + layout.dropped.len(), boxes.len());
        for p in &layout.placements {
            let b = boxes.iter().find(|b| b.feature == p.feature).unwrap();
            prop_assert_eq!(p.height + p.trims, b.initial_height);
            prop_assert_eq!(p.length, p.height * b.chars);
        }
        prop_assert_eq!(insert_boxes(boxes, inst.canvas), layout);
    }

    #[test]
    fn placements_are_first_fit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = fuzz::instance(&mut rng, 2..=12, 1..=6, 16..=40);
        let layout = insert_boxes(compute_boxes(&inst.weights, &inst.chars, inst.canvas).unwrap(), inst.canvas);
        // Replay: no lexicographically earlier position was free when each box went in.
        let (w, h) = (inst.canvas.width, inst.canvas.height);
        let mut grid = vec![false; (w * h) as usize];
        for p in &layout.placements {
            for r in 0..=h - p.height {
                for c in 0..=w - p.length {
                    if (r, c) >= (p.row, p.col) {
                        break;
                    }
                    let free = (r..r + p.height).all(|y| (c..c + p.length).all(|x| !grid[(y * w + x) as usize]));
                    prop_assert!(!free, "{} could have gone at ({}, {})", p.feature, r, c);
                }
            }
            for y in p.row..p.row + p.height {
                for x in p.col..p.col + p.length {
                    grid[(y * w + x) as usize] = true;
                }
            }
        }
    }
}
