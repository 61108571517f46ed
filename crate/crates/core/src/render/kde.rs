//! Gaussian product-kernel density estimate on a regular grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::geometry::Vec2;

/// Rectangular data window `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Extent {
    pub fn square(r: f64) -> Self {
        Self {
            x_min: -r,
            x_max: r,
            y_min: -r,
            y_max: r,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub extent: Extent,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `values[j * nx + i]` at cell center `(i, j)`; `j` grows
    /// with y.
    pub values: Vec<f64>,
    pub bandwidth: (f64, f64),
}

impl DensityGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            self.extent.width() / self.nx as f64,
            self.extent.height() / self.ny as f64,
        )
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        let (dx, dy) = self.cell_size();
        Vec2::new(
            self.extent.x_min + (i as f64 + 0.5) * dx,
            self.extent.y_min + (j as f64 + 0.5) * dy,
        )
    }

    /// Riemann sum of the density over the grid.
    pub fn integral(&self) -> f64 {
        let (dx, dy) = self.cell_size();
        self.values.iter().sum::<f64>() * dx * dy
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Cell index `(i, j)` of the largest value; first in row-major order
    /// on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        (best % self.nx, best / self.nx)
    }
}

/// Scott's rule `σ̂·N^(-1/6)`, floored at `1e-6·span`. Degenerate columns
/// (σ̂ = 0) fall back to a tenth of the span.
pub fn scott_bandwidth(values: &[f64], span: f64) -> f64 {
    let n = values.len() as f64;
    let sigma = if values.len() > 1 {
        let mean = values.iter().sum::<f64>() / n;
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let h = sigma * n.powf(-1.0 / 6.0);
    if h > 0.0 {
        h.max(1e-6 * span)
    } else {
        0.1 * span
    }
}

fn spans(points: &[Vec2]) -> ((f64, f64), (f64, f64)) {
    let fold = |f: fn(&Vec2) -> f64| {
        points
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    (fold(|p| p.x), fold(|p| p.y))
}

fn check_points(points: &[Vec2], nx: usize, ny: usize) -> Result<(), RenderError> {
    if points.is_empty() {
        return Err(RenderError::EmptyPoints);
    }
    if nx == 0 || ny == 0 {
        return Err(RenderError::InvalidConfig("grid needs at least one cell per axis".into()));
    }
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(RenderError::InvalidConfig("non-finite point".into()));
    }
    Ok(())
}

/// KDE over an automatic window: the points' bounding box widened by four
/// bandwidths on every side.
pub fn kde_grid(
    points: &[Vec2],
    nx: usize,
    ny: usize,
    bandwidth: Option<(f64, f64)>,
) -> Result<DensityGrid, RenderError> {
    check_points(points, nx, ny)?;
    let ((x_lo, x_hi), (y_lo, y_hi)) = spans(points);
    let (mut wx, mut wy) = (x_hi - x_lo, y_hi - y_lo);
    if wx == 0.0 {
        wx = if wy > 0.0 { wy } else { 1.0 };
    }
    if wy == 0.0 {
        wy = wx;
    }
    let h = match bandwidth {
        Some(h) => h,
        None => {
            let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
            (scott_bandwidth(&xs, wx), scott_bandwidth(&ys, wy))
        }
    };
    let extent = Extent {
        x_min: x_lo - 4.0 * h.0,
        x_max: x_hi + 4.0 * h.0,
        y_min: y_lo - 4.0 * h.1,
        y_max: y_hi + 4.0 * h.1,
    };
    evaluate(points, extent, nx, ny, h)
}

/// KDE over a caller-chosen window.
pub fn kde_grid_in(
    points: &[Vec2],
    extent: Extent,
    nx: usize,
    ny: usize,
    bandwidth: Option<(f64, f64)>,
) -> Result<DensityGrid, RenderError> {
    check_points(points, nx, ny)?;
    if !(extent.width() > 0.0 && extent.height() > 0.0) {
        return Err(RenderError::InvalidConfig("empty grid extent".into()));
    }
    let h = bandwidth.unwrap_or_else(|| {
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        (
            scott_bandwidth(&xs, extent.width()),
            scott_bandwidth(&ys, extent.height()),
        )
    });
    evaluate(points, extent, nx, ny, h)
}

const CHUNK: usize = 2048;

fn evaluate(
    points: &[Vec2],
    extent: Extent,
    nx: usize,
    ny: usize,
    (hx, hy): (f64, f64),
) -> Result<DensityGrid, RenderError> {
    if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
        return Err(RenderError::InvalidConfig(format!(
            "bandwidth must be positive, got ({hx}, {hy})"
        )));
    }
    let mut grid = DensityGrid {
        extent,
        nx,
        ny,
        values: vec![0.0; nx * ny],
        bandwidth: (hx, hy),
    };
    let (cdx, cdy) = grid.cell_size();
    let cx: Vec<f64> = (0..nx).map(|i| extent.x_min + (i as f64 + 0.5) * cdx).collect();
    let cy: Vec<f64> = (0..ny).map(|j| extent.y_min + (j as f64 + 0.5) * cdy).collect();

    // The product kernel separates: density(i, j) = Σ_k gx[k][i]·gy[k][j].
    for chunk in points.chunks(CHUNK) {
        let gx: Vec<f64> = chunk
            .iter()
            .flat_map(|p| cx.iter().map(move |c| (-(c - p.x).powi(2) / (2.0 * hx * hx)).exp()))
            .collect();
        let gy: Vec<f64> = chunk
            .iter()
            .flat_map(|p| cy.iter().map(move |c| (-(c - p.y).powi(2) / (2.0 * hy * hy)).exp()))
            .collect();
        grid.values
            .par_chunks_mut(nx)
            .enumerate()
            .for_each(|(j, row)| {
                for k in 0..chunk.len() {
                    let w = gy[k * ny + j];
                    if w == 0.0 {
                        continue;
                    }
                    let gxk = &gx[k * nx..(k + 1) * nx];
                    for (v, g) in row.iter_mut().zip(gxk) {
                        *v += w * g;
                    }
                }
            });
    }

    let norm = 1.0 / (points.len() as f64 * 2.0 * std::f64::consts::PI * hx * hy);
    for v in &mut grid.values {
        *v *= norm;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn single_point_peaks_at_its_cell() {
        let p = Vec2::new(0.32, -0.47);
        let g = kde_grid_in(&[p], Extent::square(2.0), 40, 40, Some((0.3, 0.3))).unwrap();
        // cell width 0.1: nearest centers are x=0.35 (column 23), y=-0.45 (row 15)
        assert_eq!(g.argmax(), (23, 15));
    }

    #[test]
    fn mirrored_points_give_mirrored_grid() {
        let pts = [Vec2::new(-0.7, 0.2), Vec2::new(0.7, 0.2)];
        let g = kde_grid_in(&pts, Extent::square(2.0), 31, 17, None).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let a = g.value(i, j);
                let b = g.value(g.nx - 1 - i, j);
                assert!((a - b).abs() <= 1e-12 * a.max(b).max(1e-300));
            }
        }
    }

    #[test]
    fn gaussian_cloud_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec2> = (0..10_000)
            .map(|_| {
                Vec2::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let g = kde_grid(&pts, 100, 100, None).unwrap();
        assert!((g.integral() - 1.0).abs() < 0.02, "integral {}", g.integral());
    }

    #[test]
    fn matches_direct_sum() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.5), Vec2::new(-0.5, 2.0)];
        let (hx, hy) = (0.6, 0.9);
        let g = kde_grid(&pts, 9, 7, Some((hx, hy))).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.cell_center(i, j);
                let direct: f64 = pts
                    .iter()
                    .map(|p| {
                        (-((c.x - p.x).powi(2) / (2.0 * hx * hx) + (c.y - p.y).powi(2) / (2.0 * hy * hy))).exp()
                    })
                    .sum::<f64>()
                    / (3.0 * 2.0 * std::f64::consts::PI * hx * hy);
                assert!((g.value(i, j) - direct).abs() <= 1e-12 * direct.max(1e-300));
            }
        }
    }

    #[test]
    fn scott_rule() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let sigma = (5.0f64 / 3.0).sqrt();
        assert!((scott_bandwidth(&v, 3.0) - sigma * 4f64.powf(-1.0 / 6.0)).abs() < 1e-15);
        assert_eq!(scott_bandwidth(&[2.0, 2.0], 5.0), 0.5);
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(kde_grid(&[], 10, 10, None), Err(RenderError::EmptyPoints)));
        assert!(kde_grid(&[Vec2::ZERO], 10, 10, Some((0.0, 1.0))).is_err());
    }
}
