use std::cmp::Ordering;

use super::{KendallError, PairCounts, TauResult};
use crate::dataset::RankedDataset;

fn cmp(a: f64, b: f64) -> Ordering {
    // callers guarantee finite values; 0.0 and -0.0 compare equal
    a.partial_cmp(&b).expect("finite values")
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Sum of `g(g-1)/2` over runs of equal adjacent elements.
fn tied_pairs<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += choose2(run);
            run = 1;
        }
    }
    total + choose2(run)
}

/// Stable bottom-up merge sort returning the number of strict inversions
/// (`i < j` with `v[i] > v[j]`). Equal elements never count.
fn sort_counting_inversions(values: &mut Vec<f64>) -> u64 {
    let n = values.len();
    let mut buf = vec![0.0; n];
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        for start in (0..n).step_by(2 * width) {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if cmp(values[j], values[i]) == Ordering::Less {
                    buf[k] = values[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&values[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&values[j..end]);
        }
        std::mem::swap(values, &mut buf);
        width *= 2;
    }
    swaps
}

/// tau-b in `O(m log m)`; identical counts and tau to
/// [`tau_b_brute`](super::tau_b_brute).
pub fn tau_b_fast(dataset: &RankedDataset) -> Result<TauResult, KendallError> {
    dataset.ensure_usable()?;
    let mut pairs: Vec<(f64, f64)> = dataset.observations.iter().map(|o| (o.x, o.y)).collect();
    pairs.sort_unstable_by(|a, b| cmp(a.0, b.0).then(cmp(a.1, b.1)));

    let total = choose2(pairs.len() as u64);
    let x_tied = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let xy_tied = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    // within an x-group y is already ascending, so every inversion left is a
    // pair with strictly increasing x and strictly decreasing y
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let discordant = sort_counting_inversions(&mut ys);
    let y_tied = tied_pairs(&ys, |a, b| a == b);

    let counts = PairCounts {
        concordant: total + xy_tied - x_tied - y_tied - discordant,
        discordant,
        tie_x: x_tied - xy_tied,
        tie_y: y_tied - xy_tied,
        tie_xy: xy_tied,
        total,
    };
    Ok(TauResult::from_counts(counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kendall::tau_b_brute;
    use proptest::prelude::*;

    #[test]
    fn inversion_count_matches_quadratic() {
        let mut v = vec![3.0, 1.0, 2.0, 2.0, 5.0, 0.0, 2.0];
        let brute = (0..v.len())
            .flat_map(|i| (i + 1..v.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| v[i] > v[j])
            .count() as u64;
        assert_eq!(sort_counting_inversions(&mut v), brute);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn reversed_is_minus_one() {
        let d = RankedDataset::from_columns(&[1., 2., 3., 4.], &[4., 3., 2., 1.]);
        let r = tau_b_fast(&d).unwrap();
        assert_eq!(r.tau, Some(-1.0));
        assert_eq!(r.counts.discordant, 6);
    }

    #[test]
    fn all_duplicates() {
        let d = RankedDataset::from_columns(&[2.; 5], &[7.; 5]);
        let r = tau_b_fast(&d).unwrap();
        assert_eq!(r.counts.tie_xy, 10);
        assert_eq!(r.tau, None);
        assert_eq!(r, tau_b_brute(&d).unwrap());
    }

    #[test]
    fn signed_zeros_tie() {
        let d = RankedDataset::from_columns(&[0.0, -0.0, 1.0], &[1.0, 2.0, -0.0]);
        assert_eq!(tau_b_fast(&d).unwrap(), tau_b_brute(&d).unwrap());
    }

    fn tied_dataset() -> impl Strategy<Value = RankedDataset> {
        (2usize..80, 1i32..12).prop_flat_map(|(m, levels)| {
            proptest::collection::vec((0..levels, 0..levels), m).prop_map(|v| {
                let (x, y): (Vec<f64>, Vec<f64>) =
                    v.into_iter().map(|(a, b)| (f64::from(a), f64::from(b))).unzip();
                RankedDataset::from_columns(&x, &y)
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_brute(d in tied_dataset()) {
            prop_assert_eq!(tau_b_fast(&d).unwrap(), tau_b_brute(&d).unwrap());
        }

        #[test]
        fn negating_y_flips_tau(d in tied_dataset()) {
            let mut neg = d.clone();
            for o in &mut neg.observations {
                o.y = -o.y;
            }
            let a = tau_b_fast(&d).unwrap();
            let b = tau_b_fast(&neg).unwrap();
            prop_assert_eq!(a.counts.concordant, b.counts.discordant);
            prop_assert_eq!(a.counts.discordant, b.counts.concordant);
            prop_assert_eq!(a.counts.tie_x, b.counts.tie_x);
            prop_assert_eq!(a.tau.map(|t| -t), b.tau);
        }

        #[test]
        fn monotone_invariance(d in tied_dataset()) {
            let mut t = d.clone();
            for o in &mut t.observations {
                o.x = o.x.powi(3) + 1.0;
                o.y = (o.y * 0.5).exp();
            }
            prop_assert_eq!(tau_b_fast(&d).unwrap(), tau_b_fast(&t).unwrap());
        }
    }
}
