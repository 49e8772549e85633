//! Region of influence `Q_r`: the union over levels `2^{-j} <= r` and caps
//! `nu` of the boxes
//! `R^nu_j = { x : |x.xi^nu + s| <= c 2^{-j}, |x + s xi^nu| <= c 2^{-j/2} }`
//! where `s = +1` for the phase `x.xi + |xi|` and `s = -1` for `x.xi - |xi|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::sphere::{sphere_grid, CapGrid, PointHash};
use crate::error::{Error, Result};
use crate::multipliers::PhaseSign;

/// Number of dyadic levels kept in the union unless told otherwise. Deeper
/// levels are thinner shells around the same front and add little volume.
pub const DEFAULT_DEPTH: u32 = 4;

#[derive(Clone, Debug)]
struct Level {
    j: u32,
    grid: CapGrid,
    hash: PointHash,
    slab: f64,
    radius: f64,
}

#[derive(Clone, Debug)]
pub struct InfluenceRegion {
    r: f64,
    c: f64,
    dim: usize,
    sign: PhaseSign,
    levels: Vec<Level>,
}

/// One box `R^nu_j`.
#[derive(Clone, Debug, Serialize)]
pub struct RegionBox {
    pub j: u32,
    pub nu: usize,
    /// Point `-s xi^nu` the box is centered on.
    pub center: Vec<f64>,
    /// `c 2^{-j}`
    pub slab_half_width: f64,
    /// `c 2^{-j/2}`
    pub cap_radius: f64,
}

/// `Q_r` with the default depth and the `+|xi|` phase.
pub fn influence_region(r: f64, c: f64, sphere_dim: usize) -> Result<InfluenceRegion> {
    InfluenceRegion::new(r, c, sphere_dim, DEFAULT_DEPTH, PhaseSign::Plus)
}

/// First level of the union: the smallest `j >= 1` with `2^{-j} <= r`.
pub fn first_level(r: f64) -> u32 {
    let mut j = 1u32;
    while 2f64.powi(-(j as i32)) > r {
        j += 1;
    }
    j
}

fn unit_ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / crate::bessel::gamma::gamma_real(n as f64 / 2.0 + 1.0)
}

impl InfluenceRegion {
    pub fn new(r: f64, c: f64, sphere_dim: usize, depth: u32, sign: PhaseSign) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("region radius must lie in (0, 1), got {r}")));
        }
        if !(c > 0.0) {
            return Err(Error::Domain(format!("region constant must be positive, got {c}")));
        }
        if depth == 0 {
            return Err(Error::Domain("region needs at least one level".into()));
        }
        let j0 = first_level(r);
        let levels = (j0..j0 + depth)
            .map(|j| {
                let grid = sphere_grid(j, sphere_dim)?;
                let radius = c * 2f64.powf(-(j as f64) / 2.0);
                let mut flat = Vec::with_capacity(grid.len() * sphere_dim);
                for nu in 0..grid.len() {
                    flat.extend_from_slice(grid.center(nu));
                }
                let hash = PointHash::new(&flat, sphere_dim, radius);
                Ok(Level { j, grid, hash, slab: c * 2f64.powi(-(j as i32)), radius })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { r, c, dim: sphere_dim, sign, levels })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.j).collect()
    }

    fn s(&self) -> f64 {
        self.sign.value()
    }

    /// Radial interval `[lo, hi]` containing every box.
    pub fn shell(&self) -> (f64, f64) {
        let t = 2f64.powi(-(self.levels[0].j as i32));
        let lo = (1.0 - 2.0 * self.c * t).max(0.0).sqrt();
        let hi = (1.0 + (2.0 * self.c + self.c * self.c) * t).sqrt();
        (lo, hi)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let n2: f64 = x.iter().map(|v| v * v).sum();
        let (lo, hi) = self.shell();
        if n2 < lo * lo || n2 > hi * hi {
            return false;
        }
        let s = self.s();
        let mut q = [0.0; 3];
        for (qa, &xa) in q.iter_mut().zip(x) {
            *qa = -s * xa;
        }
        let q = &q[..self.dim];
        self.levels.iter().any(|lev| {
            let mut hit = false;
            lev.hash.candidates(q, lev.radius, |nu| {
                if hit {
                    return;
                }
                let xi = lev.grid.center(nu);
                let mut dot = 0.0;
                let mut d2 = 0.0;
                for a in 0..xi.len() {
                    dot += x[a] * xi[a];
                    let d = x[a] + s * xi[a];
                    d2 += d * d;
                }
                if (dot + s).abs() <= lev.slab && d2 <= lev.radius * lev.radius {
                    hit = true;
                }
            });
            hit
        })
    }

    pub fn boxes(&self) -> Vec<RegionBox> {
        let s = self.s();
        self.levels
            .iter()
            .flat_map(|lev| {
                (0..lev.grid.len()).map(move |nu| RegionBox {
                    j: lev.j,
                    nu,
                    center: lev.grid.center(nu).iter().map(|v| -s * v).collect(),
                    slab_half_width: lev.slab,
                    cap_radius: lev.radius,
                })
            })
            .collect()
    }

    /// Upper bound `2 c 2^{-j} |B^{N-1}| (c 2^{-j/2})^{N-1}` for one box at
    /// level `j` (slab thickness times the cross-section of the ball).
    pub fn box_volume_bound(&self, j: u32) -> f64 {
        let n = self.dim;
        2.0 * self.c
            * 2f64.powi(-(j as i32))
            * unit_ball_volume(n - 1)
            * (self.c * 2f64.powf(-(j as f64) / 2.0)).powi(n as i32 - 1)
    }

    /// Midpoint counting in polar coordinates over the bounding shell, with
    /// `radial_per_slab` cells per `2^{-j}` at the deepest level and
    /// `angular_per_cap` cells per cap aperture `2^{-j/2}` at the first.
    pub fn volume_by_grid(&self, radial_per_slab: usize, angular_per_cap: usize) -> f64 {
        let (lo, hi) = self.shell();
        let jmax = self.levels.last().unwrap().j;
        let j0 = self.levels[0].j;
        let dr_target = 2f64.powi(-(jmax as i32)) / radial_per_slab as f64;
        let n_r = ((hi - lo) / dr_target).ceil().max(1.0) as usize;
        let dr = (hi - lo) / n_r as f64;
        let dtheta = 2f64.powf(-(j0 as f64) / 2.0) / angular_per_cap as f64;
        let two_pi = 2.0 * std::f64::consts::PI;
        match self.dim {
            2 => {
                let n_t = (two_pi / dtheta).ceil() as usize;
                let dt = two_pi / n_t as f64;
                (0..n_r)
                    .into_par_iter()
                    .map(|ir| {
                        let rad = lo + (ir as f64 + 0.5) * dr;
                        let hits = (0..n_t)
                            .filter(|&it| {
                                let th = (it as f64 + 0.5) * dt;
                                self.contains(&[rad * th.cos(), rad * th.sin()])
                            })
                            .count();
                        hits as f64 * rad * dr * dt
                    })
                    .sum()
            }
            _ => {
                let n_z = (2.0 / dtheta).ceil() as usize;
                let n_p = (two_pi / dtheta).ceil() as usize;
                let (dz, dp) = (2.0 / n_z as f64, two_pi / n_p as f64);
                (0..n_r)
                    .into_par_iter()
                    .map(|ir| {
                        let rad = lo + (ir as f64 + 0.5) * dr;
                        let mut hits = 0usize;
                        for iz in 0..n_z {
                            let z = -1.0 + (iz as f64 + 0.5) * dz;
                            let rho = (1.0 - z * z).sqrt();
                            for ip in 0..n_p {
                                let p = (ip as f64 + 0.5) * dp;
                                if self.contains(&[rad * rho * p.cos(), rad * rho * p.sin(), rad * z]) {
                                    hits += 1;
                                }
                            }
                        }
                        hits as f64 * rad * rad * dr * dz * dp
                    })
                    .sum()
            }
        }
    }

    /// Monte-Carlo volume with uniform samples in the bounding shell;
    /// returns the estimate and its standard error.
    pub fn volume_by_sampling(&self, samples: usize, seed: u64) -> (f64, f64) {
        let (lo, hi) = self.shell();
        let n = self.dim as i32;
        let shell_volume = unit_ball_volume(self.dim) * (hi.powi(n) - lo.powi(n));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        let mut p = vec![0.0; self.dim];
        for _ in 0..samples {
            let u: f64 = rng.gen();
            let rad = (lo.powi(n) + u * (hi.powi(n) - lo.powi(n))).powf(1.0 / n as f64);
            let mut norm = 0.0f64;
            for v in p.iter_mut() {
                *v = rng.sample(StandardNormal);
                norm += *v * *v;
            }
            let scale = rad / norm.sqrt();
            for v in p.iter_mut() {
                *v *= scale;
            }
            if self.contains(&p) {
                hits += 1;
            }
        }
        let f = hits as f64 / samples as f64;
        (shell_volume * f, shell_volume * (f * (1.0 - f) / samples as f64).sqrt())
    }
}
