//! Reference implementations written straight from the definitions. They
//! share no code with the library.

/// Two-pass product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Chi-square by expanding the table into individual observations and
/// counting marginal frequencies one observation at a time.
pub fn chi_square(table: &[Vec<u64>]) -> f64 {
    let mut observations = Vec::new();
    for (i, row) in table.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            for _ in 0..count {
                observations.push((i, j));
            }
        }
    }
    let n = observations.len() as f64;
    let rows = table.len();
    let cols = table[0].len();
    let mut stat = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let p_row = observations.iter().filter(|o| o.0 == i).count() as f64 / n;
            let p_col = observations.iter().filter(|o| o.1 == j).count() as f64 / n;
            let observed = observations.iter().filter(|&&o| o == (i, j)).count() as f64;
            let expected = n * p_row * p_col;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    stat
}

pub fn cramers_v(table: &[Vec<u64>]) -> f64 {
    let n: u64 = table.iter().flatten().sum();
    let k = table.len().min(table[0].len()) as f64 - 1.0;
    (chi_square(table) / (n as f64 * k)).sqrt()
}

/// A box as the naive packer sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBox {
    pub name: String,
    pub order: usize,
    pub weight: f64,
    pub chars: u64,
    pub height: u64,
    pub trims: u64,
}

impl NaiveBox {
    pub fn length(&self) -> u64 {
        self.height * self.chars
    }
    pub fn area(&self) -> u64 {
        self.height * self.length()
    }
}

/// (name, row, col, height, length, trims)
pub type NaivePlacement = (String, u64, u64, u64, u64, u64);

/// Heights from the sizing equations by integer search: the largest `h`
/// with `h * h * chars <= weight * width * height`.
pub fn naive_height(weight: f64, chars: u64, width: u64, height: u64) -> u64 {
    let target = weight * (width * height) as f64;
    let mut h = 0;
    while ((h + 1) * (h + 1) * chars) as f64 <= target {
        h += 1;
    }
    h
}

fn sort_boxes(boxes: &mut [NaiveBox]) {
    boxes.sort_by(|a, b| {
        b.area()
            .cmp(&a.area())
            .then(b.weight.partial_cmp(&a.weight).unwrap())
            .then(a.order.cmp(&b.order))
    });
}

/// Exhaustive first-fit packer: checks every pixel of every candidate block.
pub fn naive_pack(mut boxes: Vec<NaiveBox>, width: u64, height: u64) -> (Vec<NaivePlacement>, Vec<String>) {
    let mut grid = vec![vec![false; width as usize]; height as usize];
    let mut placed = Vec::new();
    let mut dropped = Vec::new();
    sort_boxes(&mut boxes);
    while !boxes.is_empty() {
        let mut failed = Vec::new();
        for b in boxes {
            if b.height == 0 {
                dropped.push(b.name);
                continue;
            }
            let (h, l) = (b.height, b.length());
            let mut spot = None;
            'scan: for r in 0..height {
                for c in 0..width {
                    if r + h > height || c + l > width {
                        continue;
                    }
                    let free = (r..r + h).all(|y| (c..c + l).all(|x| !grid[y as usize][x as usize]));
                    if free {
                        spot = Some((r, c));
                        break 'scan;
                    }
                }
            }
            match spot {
                Some((r, c)) => {
                    for y in r..r + h {
                        for x in c..c + l {
                            grid[y as usize][x as usize] = true;
                        }
                    }
                    placed.push((b.name.clone(), r, c, h, l, b.trims));
                }
                None => failed.push(b),
            }
        }
        for b in &mut failed {
            b.height -= 1;
            b.trims += 1;
        }
        sort_boxes(&mut failed);
        boxes = failed;
    }
    (placed, dropped)
}
