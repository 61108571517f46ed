use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::KendallError;
use crate::dataset::{DatasetError, Observation, RankedDataset};

/// Inversion count whose tau is closest to `target` for a permutation of
/// length `m`: `round(m(m-1)(1 - target) / 4)`, clamped to the valid range.
pub fn inversions_for_target(m: usize, target: f64) -> u64 {
    let pairs = (m as u64) * (m as u64).saturating_sub(1);
    let target = target.clamp(-1.0, 1.0);
    let k = (pairs as f64 * (1.0 - target) / 4.0).round() as u64;
    k.min(pairs / 2)
}

/// Set of ascent positions `p` (where `y[p] < y[p+1]`) with O(1) insert,
/// remove and uniform sampling.
struct Ascents {
    members: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl Ascents {
    fn all(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
            slot: (0..n).map(Some).collect(),
        }
    }

    fn set(&mut self, p: usize, ascent: bool) {
        match (self.slot[p], ascent) {
            (None, true) => {
                self.slot[p] = Some(self.members.len());
                self.members.push(p);
            }
            (Some(s), false) => {
                self.members.swap_remove(s);
                if let Some(&moved) = self.members.get(s) {
                    self.slot[moved] = Some(s);
                }
                self.slot[p] = None;
            }
            _ => {}
        }
    }
}

/// `x = 1..=m` and `y` a permutation of `1..=m` with tau as close as
/// possible to `target_tau`.
///
/// Starting from the identity, each step swaps a randomly chosen adjacent
/// ascending pair, which adds exactly one inversion. The walk is driven by
/// a ChaCha8 stream seeded from `seed`, so output is reproducible.
pub fn generate_permutation_with_target_tau(
    m: usize,
    target_tau: f64,
    seed: u64,
) -> Result<RankedDataset, KendallError> {
    if m < 2 {
        return Err(DatasetError::TooFewRows { found: m }.into());
    }
    if !target_tau.is_finite() {
        return Err(KendallError::BadTarget(target_tau));
    }
    let k = inversions_for_target(m, target_tau);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<u32> = (1..=m as u32).collect();
    let mut ascents = Ascents::all(m - 1);

    for _ in 0..k {
        let p = ascents.members[rng.random_range(0..ascents.members.len())];
        y.swap(p, p + 1);
        ascents.set(p, false);
        if p > 0 {
            ascents.set(p - 1, y[p - 1] < y[p]);
        }
        if p + 2 < m {
            ascents.set(p + 1, y[p + 1] < y[p + 2]);
        }
    }

    let observations = y
        .iter()
        .enumerate()
        .map(|(i, &v)| Observation::new(i.to_string(), (i + 1) as f64, f64::from(v)))
        .collect();
    Ok(RankedDataset::new(observations, "x", "y"))
}
