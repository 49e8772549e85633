//! Nearly uniform point sets on S^1 and S^2 with nearest-neighbor spacing in
//! the dyadic window `[2^{-j/2-1}, 2^{-j/2}]`, and the cap partition of unity
//! built on them.

use std::collections::HashMap;

use serde::Serialize;

use super::bump;
use crate::error::{Error, Result};

/// One cap center `xi^nu_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapIndex {
    pub j: u32,
    pub nu: usize,
    pub center: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpacingStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Uniform hash of points in R^2 or R^3 by cubic cells of side `cell`.
#[derive(Clone, Debug)]
pub(crate) struct PointHash {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<u32>>,
}

impl PointHash {
    pub(crate) fn new(points: &[f64], dim: usize, cell: f64) -> Self {
        let mut buckets: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        for (i, p) in points.chunks_exact(dim).enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        Self { cell, buckets }
    }

    fn key(p: &[f64], cell: f64) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (slot, &v) in k.iter_mut().zip(p) {
            *slot = (v / cell).floor() as i64;
        }
        k
    }

    /// Calls `visit` with every stored index whose bucket may hold points
    /// within `radius` of `p`; the caller does the exact distance test.
    pub(crate) fn candidates(&self, p: &[f64], radius: f64, mut visit: impl FnMut(usize)) {
        let dim = p.len();
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..dim {
            lo[a] = ((p[a] - radius) / self.cell).floor() as i64;
            hi[a] = ((p[a] + radius) / self.cell).floor() as i64;
        }
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(b) = self.buckets.get(&[x, y, z]) {
                        for &i in b {
                            visit(i as usize);
                        }
                    }
                }
            }
        }
    }
}

/// Cap centers of one dyadic level with a neighbor index.
#[derive(Clone, Debug)]
pub struct CapGrid {
    j: u32,
    dim: usize,
    centers: Vec<f64>,
    hash: PointHash,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Target spacing `2^{-j/2}`; the admissible window is `[s/2, s]`.
pub fn cap_spacing(j: u32) -> f64 {
    2f64.powf(-(j as f64) / 2.0)
}

impl CapGrid {
    fn from_centers(j: u32, dim: usize, centers: Vec<f64>) -> Self {
        let hash = PointHash::new(&centers, dim, cap_spacing(j));
        Self { j, dim, centers, hash }
    }

    /// Grid from explicit unit centers, flattened `[x0, y0, (z0), x1, ...]`.
    pub fn from_points(j: u32, dim: usize, centers: Vec<f64>) -> Result<Self> {
        if !(dim == 2 || dim == 3) || centers.len() % dim != 0 || centers.is_empty() {
            return Err(Error::Construction(format!("{} coordinates do not form points in R^{dim}", centers.len())));
        }
        if centers.chunks_exact(dim).any(|c| (c.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() > 1e-12) {
            return Err(Error::Construction("cap centers must be unit vectors".into()));
        }
        Ok(Self::from_centers(j, dim, centers))
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Ambient dimension M of the sphere S^{M-1}.
    pub fn sphere_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.centers.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn center(&self, nu: usize) -> &[f64] {
        &self.centers[nu * self.dim..(nu + 1) * self.dim]
    }

    pub fn caps(&self) -> Vec<CapIndex> {
        (0..self.len())
            .map(|nu| CapIndex { j: self.j, nu, center: self.center(nu).to_vec() })
            .collect()
    }

    /// Indices of centers within `radius` of `p`.
    pub fn within(&self, p: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.hash.candidates(p, radius, |i| {
            if dist(self.center(i), p) <= radius {
                out.push(i);
            }
        });
        out
    }

    /// Chord distance from each center to its nearest neighbor.
    pub fn nearest_neighbor_distances(&self) -> Vec<f64> {
        let s = cap_spacing(self.j);
        (0..self.len())
            .map(|i| {
                let c = self.center(i);
                let mut radius = s;
                loop {
                    let mut best = f64::INFINITY;
                    self.hash.candidates(c, radius, |k| {
                        if k != i {
                            best = best.min(dist(self.center(k), c));
                        }
                    });
                    if best <= radius || radius > 4.0 {
                        return best;
                    }
                    radius *= 2.0;
                }
            })
            .collect()
    }

    pub fn spacing_stats(&self) -> SpacingStats {
        let d = self.nearest_neighbor_distances();
        let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = d.iter().cloned().fold(0.0, f64::max);
        SpacingStats { min, max, mean: d.iter().sum::<f64>() / d.len() as f64 }
    }
}

fn circle(n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(2 * n);
    for i in 0..n {
        let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        c.push(th.cos());
        c.push(th.sin());
    }
    c
}

/// Spherical Fibonacci points with the half-offset latitudes
/// `z_i = 1 - (2i+1)/n` and golden-angle longitudes.
fn fibonacci(n: usize) -> Vec<f64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut c = Vec::with_capacity(3 * n);
    for i in 0..n {
        let z = 1.0 - (2 * i + 1) as f64 / n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        let (x, y) = (r * phi.cos(), r * phi.sin());
        let norm = (x * x + y * y + z * z).sqrt();
        c.extend_from_slice(&[x / norm, y / norm, z / norm]);
    }
    c
}

/// Cap centers at level `j` on S^{M-1}: uniform angles on the circle,
/// retuned spherical Fibonacci points on S^2.
pub fn sphere_grid(j: u32, sphere_dim: usize) -> Result<CapGrid> {
    if j == 0 {
        return Err(Error::Construction("cap grids start at j = 1".into()));
    }
    let s = cap_spacing(j);
    match sphere_dim {
        2 => {
            let n = (2.0 * std::f64::consts::PI / (0.75 * s)).ceil() as usize;
            let grid = CapGrid::from_centers(j, 2, circle(n.max(3)));
            let st = grid.spacing_stats();
            if st.min < s / 2.0 || st.max > s {
                return Err(Error::Construction(format!("circle grid spacing {st:?} outside window")));
            }
            Ok(grid)
        }
        3 => {
            // area per point of a hexagonal packing with spacing d is
            // (sqrt 3/2) d^2; aim for d = 0.75 s and retune
            let mut n = (4.0 * std::f64::consts::PI / (0.866 * (0.75 * s).powi(2))).round() as usize;
            for _ in 0..60 {
                let grid = CapGrid::from_centers(j, 3, fibonacci(n.max(4)));
                let st = grid.spacing_stats();
                if st.min >= s / 2.0 && st.max <= s {
                    return Ok(grid);
                }
                if st.max > s {
                    n += n / 20 + 1;
                } else {
                    n -= n / 20 + 1;
                }
            }
            Err(Error::Construction(format!("no Fibonacci grid with spacing in [{}, {s}] at j = {j}", s / 2.0)))
        }
        m => Err(Error::Construction(format!(
            "cap grids are built for sphere dimensions 2 and 3, got {m}"
        ))),
    }
}

/// Partition of unity `phi^nu_j(xi) = phi(2^{j/2}|xi/|xi| - xi^nu|) / sum`,
/// returned as `(nu, weight)` pairs with nonzero weight.
pub fn cap_partition(grid: &CapGrid, xi: &[f64]) -> Result<Vec<(usize, f64)>> {
    if xi.len() != grid.sphere_dim() {
        return Err(Error::Contract(format!(
            "frequency has {} components for a sphere in R^{}",
            xi.len(),
            grid.sphere_dim()
        )));
    }
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Coverage("cap partition is undefined at xi = 0".into()));
    }
    let omega: Vec<f64> = xi.iter().map(|v| v / norm).collect();
    let scale = 2f64.powf(grid.j() as f64 / 2.0);
    let reach = 2.0 / scale;
    let mut weights: Vec<(usize, f64)> = grid
        .within(&omega, reach)
        .into_iter()
        .map(|nu| (nu, bump(scale * dist(grid.center(nu), &omega))))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::Coverage(format!(
            "direction {omega:?} is not covered by any cap at level {}",
            grid.j()
        )));
    }
    for w in weights.iter_mut() {
        w.1 /= total;
    }
    weights.sort_by_key(|&(nu, _)| nu);
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_count_at_j4() {
        let g = sphere_grid(4, 2).unwrap();
        assert!((26..=51).contains(&g.len()), "{}", g.len());
        let st = g.spacing_stats();
        assert!(st.min >= 0.125 && st.max <= 0.25);
    }

    #[test]
    fn sphere_spacing_window() {
        for j in 1..=10 {
            let g = sphere_grid(j, 3).unwrap();
            let st = g.spacing_stats();
            let s = cap_spacing(j);
            assert!(st.min >= s / 2.0 && st.max <= s, "j={j} {st:?}");
            for nu in 0..g.len() {
                let n: f64 = g.center(nu).iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(sphere_grid(3, 4), Err(Error::Construction(_))));
        assert!(sphere_grid(0, 2).is_err());
    }

    #[test]
    fn partition_sums_to_one() {
        let g = sphere_grid(6, 3).unwrap();
        let w = cap_partition(&g, &[0.3, -0.2, 0.9]).unwrap();
        let s: f64 = w.iter().map(|p| p.1).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}
