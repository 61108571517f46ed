//! Marching-squares isolines over a [`DensityGrid`].
//!
//! Samples sit at cell centers; crossings are linearly interpolated along
//! grid edges and stitched into polylines. Ambiguous saddle cells are
//! resolved with the mean of their four corners. Lines that reach the edge
//! of the grid stay open.

use serde::{Deserialize, Serialize};

use super::kde::DensityGrid;
use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    pub closed: bool,
}

impl Polyline {
    /// Eccentricity `sqrt(1 - λmin/λmax)` of the ellipse with the same
    /// second area moments as the enclosed polygon. Zero for a circle;
    /// `None` for open or degenerate lines.
    pub fn eccentricity(&self) -> Option<f64> {
        if !self.closed || self.points.len() < 3 {
            return None;
        }
        let n = self.points.len() as f64;
        let mean = self.points.iter().fold(Vec2::ZERO, |acc, &p| acc + p).scale(1.0 / n);
        let pts: Vec<Vec2> = self.points.iter().map(|&p| p - mean).collect();
        let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
        let (mut ixx, mut iyy, mut ixy) = (0.0, 0.0, 0.0);
        for k in 0..pts.len() {
            let (p, q) = (pts[k], pts[(k + 1) % pts.len()]);
            let cross = p.x * q.y - q.x * p.y;
            a += cross;
            cx += (p.x + q.x) * cross;
            cy += (p.y + q.y) * cross;
            ixx += (p.x * p.x + p.x * q.x + q.x * q.x) * cross;
            iyy += (p.y * p.y + p.y * q.y + q.y * q.y) * cross;
            ixy += (p.x * q.y + 2.0 * p.x * p.y + 2.0 * q.x * q.y + q.x * p.y) * cross;
        }
        let area = a / 2.0;
        if area.abs() < f64::EPSILON {
            return None;
        }
        let (cx, cy) = (cx / (6.0 * area), cy / (6.0 * area));
        let sxx = ixx / 12.0 / area - cx * cx;
        let syy = iyy / 12.0 / area - cy * cy;
        let sxy = ixy / 24.0 / area - cx * cy;
        let tr = sxx + syy;
        let disc = ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt();
        let (hi, lo) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        Some((1.0 - lo / hi).max(0.0).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourLevel {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

/// `count` levels equally spaced from 10% to 90% of the grid maximum.
/// A single level sits at 50%.
pub fn default_levels(grid: &DensityGrid, count: usize) -> Vec<f64> {
    let max = grid.max();
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * max],
        n => (0..n)
            .map(|k| max * (0.1 + 0.8 * k as f64 / (n - 1) as f64))
            .collect(),
    }
}

pub fn contour_polylines(grid: &DensityGrid, levels: &[f64]) -> Vec<ContourLevel> {
    levels
        .iter()
        .map(|&level| ContourLevel {
            level,
            polylines: if level > 0.0 && level.is_finite() {
                isolines(grid, level)
            } else {
                Vec::new()
            },
        })
        .collect()
}

/// Grid edges are numbered: horizontal edges between samples `(i, j)` and
/// `(i + 1, j)` first, then vertical edges between `(i, j)` and `(i, j + 1)`.
struct Edges {
    nx: usize,
    ny: usize,
}

impl Edges {
    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * (self.nx - 1) + i
    }

    fn vertical(&self, i: usize, j: usize) -> usize {
        (self.nx - 1) * self.ny + j * self.nx + i
    }

    fn count(&self) -> usize {
        (self.nx - 1) * self.ny + self.nx * (self.ny - 1)
    }
}

fn isolines(grid: &DensityGrid, level: f64) -> Vec<Polyline> {
    let (nx, ny) = (grid.nx, grid.ny);
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let edges = Edges { nx, ny };
    let above = |i: usize, j: usize| grid.value(i, j) > level;
    let crossing = |a: (usize, usize), b: (usize, usize)| {
        let (va, vb) = (grid.value(a.0, a.1), grid.value(b.0, b.1));
        let t = (level - va) / (vb - va);
        let (pa, pb) = (grid.cell_center(a.0, a.1), grid.cell_center(b.0, b.1));
        Vec2::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y))
    };

    let mut points: Vec<Option<Vec2>> = vec![None; edges.count()];
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); edges.count()];
    let mut segments: Vec<(usize, usize)> = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            // corners counter-clockwise from bottom-left
            let bl = above(i, j);
            let br = above(i + 1, j);
            let tr = above(i + 1, j + 1);
            let tl = above(i, j + 1);
            let case = (bl as u8) | (br as u8) << 1 | (tr as u8) << 2 | (tl as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = edges.horizontal(i, j);
            let top = edges.horizontal(i, j + 1);
            let left = edges.vertical(i, j);
            let right = edges.vertical(i + 1, j);
            let mut touch = |e: usize, a: (usize, usize), b: (usize, usize)| {
                if points[e].is_none() {
                    points[e] = Some(crossing(a, b));
                }
            };
            touch(bottom, (i, j), (i + 1, j));
            touch(top, (i, j + 1), (i + 1, j + 1));
            touch(left, (i, j), (i, j + 1));
            touch(right, (i + 1, j), (i + 1, j + 1));

            let centre_above = {
                let mean = (grid.value(i, j)
                    + grid.value(i + 1, j)
                    + grid.value(i + 1, j + 1)
                    + grid.value(i, j + 1))
                    / 4.0;
                mean > level
            };
            let pairs: &[(usize, usize)] = match case {
                1 | 14 => &[(left, bottom)],
                2 | 13 => &[(bottom, right)],
                3 | 12 => &[(left, right)],
                4 | 11 => &[(right, top)],
                6 | 9 => &[(bottom, top)],
                7 | 8 => &[(left, top)],
                5 if centre_above => &[(left, top), (bottom, right)],
                5 => &[(left, bottom), (right, top)],
                10 if centre_above => &[(left, bottom), (right, top)],
                10 => &[(left, top), (bottom, right)],
                _ => unreachable!("cases 0 and 15 skipped"),
            };
            for &(a, b) in pairs {
                let s = segments.len();
                segments.push((a, b));
                links[a].push(s);
                links[b].push(s);
            }
        }
    }

    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start_edge: usize, first_seg: usize, used: &mut Vec<bool>| {
        let mut chain = vec![start_edge];
        let mut edge = start_edge;
        let mut seg = first_seg;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            chain.push(edge);
            match links[edge].iter().find(|&&s| !used[s]) {
                Some(&next) => seg = next,
                None => break,
            }
        }
        let closed = chain.len() > 2 && chain.first() == chain.last();
        if closed {
            chain.pop();
        }
        Polyline {
            points: chain.iter().map(|&e| points[e].expect("crossing recorded")).collect(),
            closed,
        }
    };

    // open lines start at edges touched by a single segment
    for e in 0..links.len() {
        if links[e].len() == 1 && !used[links[e][0]] {
            out.push(walk(e, links[e][0], &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(segments[s].0, s, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::kde::{kde_grid_in, Extent};

    fn constant(v: f64) -> DensityGrid {
        DensityGrid {
            extent: Extent::square(1.0),
            nx: 8,
            ny: 8,
            values: vec![v; 64],
            bandwidth: (1.0, 1.0),
        }
    }

    #[test]
    fn constant_grid_has_no_lines_above() {
        let levels = contour_polylines(&constant(2.0), &[3.0, 2.0]);
        assert!(levels.iter().all(|l| l.polylines.is_empty()));
    }

    #[test]
    fn zero_level_is_empty() {
        let g = kde_grid_in(&[Vec2::ZERO], Extent::square(3.0), 30, 30, Some((1.0, 1.0))).unwrap();
        assert!(contour_polylines(&g, &[0.0])[0].polylines.is_empty());
    }

    #[test]
    fn single_kernel_gives_circles() {
        let c = Vec2::new(0.13, -0.21);
        let g = kde_grid_in(&[c], Extent::square(4.0), 81, 81, Some((1.0, 1.0))).unwrap();
        let levels = default_levels(&g, 5);
        for level in contour_polylines(&g, &levels) {
            assert_eq!(level.polylines.len(), 1, "level {}", level.level);
            let line = &level.polylines[0];
            assert!(line.closed);
            let e = line.eccentricity().unwrap();
            assert!(e < 0.05, "eccentricity {e} at level {}", level.level);
            let radii: Vec<f64> = line.points.iter().map(|p| (*p - c).length()).collect();
            let expected = (-2.0 * (level.level * 2.0 * std::f64::consts::PI).ln()).sqrt();
            for r in radii {
                assert!((r - expected).abs() < 0.02, "radius {r} vs {expected}");
            }
        }
    }

    #[test]
    fn lines_crossing_the_border_are_open() {
        let g = kde_grid_in(&[Vec2::new(1.0, 0.0)], Extent::square(1.0), 20, 20, Some((0.8, 0.8))).unwrap();
        let lines = &contour_polylines(&g, &[0.5 * g.max()])[0].polylines;
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
    }

    #[test]
    fn two_blobs_two_rings() {
        let pts = [Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)];
        let g = kde_grid_in(&pts, Extent::square(5.0), 60, 60, Some((0.5, 0.5))).unwrap();
        let lines = &contour_polylines(&g, &[0.5 * g.max()])[0].polylines;
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.closed));
    }

    #[test]
    fn eccentricity_of_known_shapes() {
        let ring = |rx: f64, ry: f64| Polyline {
            points: (0..400)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::TAU / 400.0;
                    Vec2::new(3.0 + rx * t.cos(), ry * t.sin())
                })
                .collect(),
            closed: true,
        };
        assert!(ring(1.0, 1.0).eccentricity().unwrap() < 1e-6);
        let e = ring(2.0, 1.0).eccentricity().unwrap();
        assert!((e - 0.75f64.sqrt()).abs() < 1e-3, "{e}");
        let square = Polyline {
            points: vec![Vec2::new(0., 0.), Vec2::new(1., 0.), Vec2::new(1., 1.), Vec2::new(0., 1.)],
            closed: true,
        };
        assert!(square.eccentricity().unwrap() < 1e-12);
        assert_eq!(Polyline { points: square.points.clone(), closed: false }.eccentricity(), None);
    }

    #[test]
    fn default_level_spacing() {
        let g = constant(10.0);
        assert_eq!(default_levels(&g, 1), vec![5.0]);
        let l = default_levels(&g, 3);
        assert!((l[0] - 1.0).abs() < 1e-12 && (l[1] - 5.0).abs() < 1e-12 && (l[2] - 9.0).abs() < 1e-12);
    }
}
