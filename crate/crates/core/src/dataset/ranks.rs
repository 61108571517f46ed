use super::RankedDataset;

/// 1-based ranks where each tied group gets the mean of the positions it
/// occupies. Values must be finite.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));

    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end, mean is their midpoint
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

pub fn to_midranks(dataset: &RankedDataset) -> RankedDataset {
    let xr = midranks(&dataset.xs());
    let yr = midranks(&dataset.ys());
    let mut out = dataset.clone();
    for (o, (x, y)) in out.observations.iter_mut().zip(xr.into_iter().zip(yr)) {
        o.x = x;
        o.y = y;
    }
    out
}
