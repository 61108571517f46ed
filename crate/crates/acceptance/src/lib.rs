//! Shared fixtures for the acceptance run.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use taugraph::dataset::RankedDataset;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` observations whose coordinates take one of `levels` integer values
/// each, so small `levels` gives heavy ties.
pub fn tied_dataset(rng: &mut impl Rng, m: usize, levels: u32) -> RankedDataset {
    let x: Vec<f64> = (0..m).map(|_| rng.random_range(0..levels) as f64).collect();
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(0..levels) as f64).collect();
    RankedDataset::from_columns(&x, &y)
}

/// Random size in `2..=max_m` and random tie density.
pub fn random_dataset(rng: &mut impl Rng, max_m: usize) -> RankedDataset {
    let m = rng.random_range(2..=max_m);
    let levels = match rng.random_range(0..4) {
        0 => 2,
        1 => rng.random_range(3..10),
        2 => (m as u32 / 4).max(2),
        _ => 1_000_000,
    };
    tied_dataset(rng, m, levels)
}

/// Continuous coordinates, ties essentially impossible.
pub fn continuous_dataset(rng: &mut impl Rng, m: usize) -> RankedDataset {
    let x: Vec<f64> = (0..m).map(|_| rng.random_range(-100.0..100.0)).collect();
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(-100.0..100.0)).collect();
    RankedDataset::from_columns(&x, &y)
}
