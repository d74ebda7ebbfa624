//! Random packing instances.

use dwtm::association::{AssociationMethod, AssociationScore, WeightTable};
use dwtm::layout::CanvasConfig;
use rand::Rng;
use rand_distr::Exp1;

#[derive(Debug, Clone)]
pub struct Instance {
    pub weights: WeightTable,
    pub chars: Vec<usize>,
    pub canvas: CanvasConfig,
}

/// Flat-Dirichlet weights (normalized unit exponentials).
pub fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

pub fn instance<R: Rng>(
    rng: &mut R,
    features: std::ops::RangeInclusive<usize>,
    chars: std::ops::RangeInclusive<usize>,
    side: std::ops::RangeInclusive<u32>,
) -> Instance {
    let n = rng.gen_range(features);
    let weights = dirichlet(rng, n);
    let scores = weights
        .iter()
        .enumerate()
        .map(|(i, w)| AssociationScore::new(format!("f{i}"), AssociationMethod::Pearson, *w))
        .collect();
    Instance {
        weights: WeightTable::from_scores(scores).unwrap(),
        chars: (0..n).map(|_| rng.gen_range(chars.clone())).collect(),
        canvas: CanvasConfig::new(rng.gen_range(side.clone()), rng.gen_range(side)).unwrap(),
    }
}
