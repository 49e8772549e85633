//! Test functions (H1 atoms, cap-concentrated Knapp profiles, random
//! band-limited fields) and operator-norm quotients
//! `||f * Omega^alpha||_{L^p_r} / ||f||_{L^p_s}` swept over parameters.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{bump, shell_cutoff, sphere_grid, CapIndex};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, Direction, Field, GridSpec, LpExponent, Side};
use crate::multipliers::{apply_multiplier, MultiplierTable, Provenance, C64};
use crate::sobolev::{sobolev_norm_with, SobolevParams};
use crate::stats::{compensated_sum, fit_line};
use crate::wave::WaveConfig;

fn ball_volume(n: usize, r: f64) -> f64 {
    PI.powf(n as f64 / 2.0) / crate::bessel::gamma::gamma_real(n as f64 / 2.0 + 1.0) * r.powi(n as i32)
}

/// Two-lobe atom on `B_r(center)`: `+|B_r|^{-1}` where `x_0 > center_0`,
/// `-|B_r|^{-1}` where `x_0 < center_0`, then the grid mean over the
/// support is removed and the result rescaled so the size bound holds.
pub fn h1_atom(r: f64, center: &[f64], spec: &GridSpec) -> Result<Field<f64>> {
    let n = spec.dim_total();
    if center.len() != n {
        return Err(Error::Contract(format!("center has {} components in R^{n}", center.len())));
    }
    let l = spec.half_width();
    if !(r > 0.0 && r < l / 2.0) {
        return Err(Error::Domain(format!("atom radius must lie in (0, L/2) = (0, {}), got {r}", l / 2.0)));
    }
    let height = 1.0 / ball_volume(n, r);
    let inside = |x: &[f64]| x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < r * r;
    let mut f = Field::<f64>::from_fn(spec.clone(), |x| {
        if !inside(x) {
            return Complex::new(0.0, 0.0);
        }
        let d = x[0] - center[0];
        Complex::new(if d > 0.0 { height } else if d < 0.0 { -height } else { 0.0 }, 0.0)
    });
    let mut xbuf = vec![0.0; n];
    let support: Vec<usize> = (0..spec.len())
        .filter(|&i| {
            spec.point(i, &mut xbuf);
            inside(&xbuf)
        })
        .collect();
    let (pos, neg) = support.iter().fold((0, 0), |(p, q), &i| {
        let v = f.values()[i].re;
        (p + (v > 0.0) as usize, q + (v < 0.0) as usize)
    });
    if pos == 0 || neg == 0 {
        return Err(Error::Domain(format!("atom radius {r} is not resolved by grid spacing {}", spec.spacing())));
    }
    let values = f.values_mut();
    let mean = support.iter().map(|&i| values[i].re).sum::<f64>() / support.len() as f64;
    for &i in &support {
        values[i].re -= mean;
    }
    let top = support.iter().fold(0.0f64, |a, &i| a.max(values[i].re.abs()));
    if top > height {
        for &i in &support {
            values[i].re *= height / top;
        }
    }
    // the rounding left in the sum is moved onto one cell whose magnitude
    // it shrinks, so the size bound is untouched
    for _ in 0..2 {
        let rest = compensated_sum(support.iter().map(|&i| values[i].re));
        if rest == 0.0 {
            break;
        }
        if let Some(&i) = support.iter().find(|&&i| values[i].re * rest > 0.0 && values[i].re.abs() > rest.abs()) {
            values[i].re -= rest;
        }
    }
    Ok(f)
}

/// `|B_r|^{-1}`, the atom size bound.
pub fn atom_height(dim: usize, r: f64) -> f64 {
    1.0 / ball_volume(dim, r)
}

/// Unit-L2 field whose spectrum is `phi_j(|xi|) phi(2^{j/2}|xi/|xi| - xi^nu|)`,
/// supported in the shell `2^{j-1} <= |xi| <= 2^{j+1}` and the cap
/// `|xi/|xi| - xi^nu| <= 2^{1-j/2}`.
pub fn knapp_profile(cap: &CapIndex, spec: &GridSpec) -> Result<Field<f64>> {
    let n = spec.dim_total();
    if cap.center.len() != n {
        return Err(Error::Contract(format!(
            "cap lives on S^{} but the grid is {n}-dimensional",
            cap.center.len() - 1
        )));
    }
    let edge = 2f64.powi(cap.j as i32 + 1);
    if spec.nyquist() < edge {
        return Err(Error::Resolution {
            reason: format!("cap shell j = {} reaches {edge}, Nyquist is {}", cap.j, spec.nyquist()),
            required_samples: crate::kernelcheck::required_samples(cap.j, spec.half_width()),
        });
    }
    let spectrum = knapp_spectrum(cap, spec);
    let f = spectrum.transform(Direction::Inverse)?;
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Err(Error::Resolution {
            reason: format!("cap at j = {} contains no grid frequency", cap.j),
            required_samples: 2 * spec.samples_per_axis(),
        });
    }
    Ok(f.scale(Complex::new(1.0 / norm, 0.0)))
}

fn knapp_spectrum(cap: &CapIndex, spec: &GridSpec) -> Field<f64> {
    let scale = 2f64.powf(cap.j as f64 / 2.0);
    Field::from_frequency_fn(spec.clone(), |xi| {
        let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xn == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let d = xi.iter().zip(&cap.center).map(|(a, c)| (a / xn - c).powi(2)).sum::<f64>().sqrt();
        Complex::new(shell_cutoff(cap.j as i32, xn) * bump(scale * d), 0.0)
    })
}

/// Fraction of spectral L2 mass of `f` outside the Knapp support of `cap`.
pub fn knapp_leakage(f: &Field<f64>, cap: &CapIndex) -> Result<f64> {
    let spectrum = f.transform(Direction::Forward)?;
    let reach = 2f64.powf(1.0 - cap.j as f64 / 2.0);
    let (lo, hi) = (2f64.powi(cap.j as i32 - 1), 2f64.powi(cap.j as i32 + 1));
    let spec = f.spec();
    let n = spec.dim_total();
    let (outside, total) = (0..spec.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |xi, flat| {
                spec.frequency_point(flat, xi);
                let w = spectrum.values()[flat].norm_sqr();
                let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                let inside = xn >= lo && xn <= hi && {
                    let d = xi.iter().zip(&cap.center).map(|(a, c)| (a / xn - c).powi(2)).sum::<f64>().sqrt();
                    d <= reach
                };
                (if inside { 0.0 } else { w }, w)
            },
        )
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(if total > 0.0 { (outside / total).sqrt() } else { 0.0 })
}

/// Standard deviations of `|f|^2` along the cap direction and across it.
pub fn knapp_spreads(f: &Field<f64>, cap: &CapIndex) -> (f64, f64) {
    let spec = f.spec();
    let n = spec.dim_total();
    let (m0, m_rad, m_all) = (0..spec.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |x, flat| {
                spec.point(flat, x);
                let w = f.values()[flat].norm_sqr();
                let along: f64 = x.iter().zip(&cap.center).map(|(a, b)| a * b).sum();
                let all: f64 = x.iter().map(|v| v * v).sum();
                (w, w * along * along, w * all)
            },
        )
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let radial = (m_rad / m0).sqrt();
    let transverse = ((m_all - m_rad) / m0 / (n as f64 - 1.0)).sqrt();
    (radial, transverse)
}

/// Real field with independent Gaussian Fourier coefficients on
/// `0 < |xi| <= band` (Hermitian pairs, so the field is real).
pub fn random_band_limited(spec: &GridSpec, band: f64, seed: u64) -> Result<Field<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim_total();
    let mut xi = vec![0.0; n];
    let coeffs: Vec<C64> = (0..spec.len())
        .map(|flat| {
            spec.frequency_point(flat, &mut xi);
            let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if xn > 0.0 && xn <= band {
                Complex::new(re, im)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    let f = Field::new(spec.clone(), Side::Frequency, coeffs)?.transform(Direction::Inverse)?;
    let real = f.map(|v| Complex::new(v.re, 0.0));
    if real.sup_norm() == 0.0 {
        return Err(Error::Domain(format!("band {band} holds no nonzero grid frequency")));
    }
    Ok(real)
}

/// Forcing `g(x, t) = f(x) (1 + 0.5 sin(2 pi beta t))` with a random
/// band-limited `f` and `beta` uniform in `[0.5, 2]`.
pub fn random_forcing(config: &WaveConfig, band: f64, seed: u64) -> Result<Vec<Field<f64>>> {
    let f = random_band_limited(&config.spec, band, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let beta = Uniform::new(0.5, 2.0).sample(&mut rng);
    Ok(config
        .times()
        .iter()
        .map(|t| f.scale(Complex::new(1.0 + 0.5 * (2.0 * PI * beta * t).sin(), 0.0)))
        .collect())
}

/// Isotropic Bessel potential `(1 + |xi|^2)^{r/2}`.
pub fn bessel_potential_table(r: f64, spec: &GridSpec) -> Result<MultiplierTable<f64>> {
    MultiplierTable::from_fn(spec.clone(), Provenance::Custom, |xi| {
        Complex::new((1.0 + xi.iter().map(|v| v * v).sum::<f64>()).powf(r / 2.0), 0.0)
    })
}

/// `||op f||_{L^p_r} / ||f||_{L^p_s}` with the isotropic output order `r`.
pub fn norm_ratio(
    op: &MultiplierTable<f64>,
    f: &Field<f64>,
    in_params: &SobolevParams,
    r: f64,
    p: LpExponent,
) -> Result<f64> {
    if f.sup_norm() == 0.0 {
        return Err(Error::Domain("norm ratio of the zero field is undefined".into()));
    }
    let out_table = op.product(&bessel_potential_table(r, f.spec())?)?;
    let num = lp_norm(&apply_multiplier(f, &out_table)?, p)?;
    let b_s = MultiplierTable::b_s(&in_params.s, f.spec())?;
    let den = sobolev_norm_with(f, &b_s, p)?;
    if den == 0.0 {
        return Err(Error::Domain("input Sobolev norm vanished".into()));
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Atoms,
    Knapp,
    Random,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "atoms" => Ok(Family::Atoms),
            "knapp" => Ok(Family::Knapp),
            "random" => Ok(Family::Random),
            o => Err(Error::Validation { field: "family", reason: format!("expected atoms, knapp or random, got {o:?}") }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub r: f64,
    pub s_total: f64,
    pub p: f64,
    pub ratio_max: f64,
    pub inside_theory: bool,
    /// Slope of `log2 ratio` against the Knapp level, when the family is Knapp.
    pub knapp_slope: Option<f64>,
}

/// `|1/p - 1/2| <= (alpha - r + |s|)/(N-1) + 1/2`.
pub fn inside_theory(alpha: f64, r: f64, s_total: f64, p: f64, dim: usize) -> bool {
    (1.0 / p - 0.5).abs() <= (alpha - r + s_total) / (dim as f64 - 1.0) + 0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySizes {
    pub random: usize,
    pub knapp_levels: usize,
    pub atom_radii: usize,
}

impl Default for FamilySizes {
    fn default() -> Self {
        Self { random: 20, knapp_levels: 6, atom_radii: 4 }
    }
}

/// Members of a test family on `spec`, labeled by a level used for trend
/// fits (the Knapp `j`, the atom index, or the draw number).
pub fn family_members(family: Family, spec: &GridSpec, sizes: &FamilySizes, seed: u64) -> Result<Vec<(u32, Field<f64>)>> {
    match family {
        Family::Random => (0..sizes.random)
            .map(|k| Ok((k as u32, random_band_limited(spec, spec.nyquist() / 2.0, seed + k as u64)?)))
            .collect(),
        Family::Atoms => {
            let l = spec.half_width();
            let center = vec![0.0; spec.dim_total()];
            (0..sizes.atom_radii)
                .map(|k| {
                    let r = l / 4.0 * 2f64.powi(-(k as i32));
                    Ok((k as u32, h1_atom(r, &center, spec)?))
                })
                .collect()
        }
        Family::Knapp => {
            let n = spec.dim_total();
            let top = (spec.nyquist().log2().floor() as i64 - 1).max(1) as u32;
            let bottom = top.saturating_sub(sizes.knapp_levels as u32 - 1).max(1);
            (bottom..=top)
                .map(|j| {
                    let grid = sphere_grid(j, n)?;
                    let cap = grid.caps().into_iter().next().ok_or_else(|| Error::Construction("empty cap grid".into()))?;
                    Ok((j, knapp_profile(&cap, spec)?))
                })
                .collect()
        }
    }
}

/// One row per `(alpha, r, s, p)`; `ratio_max` is the largest quotient over
/// the family. Empty parameter lists give an empty table.
pub fn region_sweep(
    alphas: &[f64],
    rs: &[f64],
    ss: &[Vec<f64>],
    ps: &[f64],
    family: Family,
    spec: &GridSpec,
    sizes: &FamilySizes,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() || rs.is_empty() || ss.is_empty() || ps.is_empty() {
        return Ok(Vec::new());
    }
    let members = family_members(family, spec, sizes, seed)?;
    let spectra = members
        .iter()
        .map(|(_, f)| f.transform(Direction::Forward))
        .collect::<Result<Vec<_>>>()?;
    let dim = spec.dim_total();
    let mut rows = Vec::new();
    for &alpha in alphas {
        let omega = MultiplierTable::<f64>::omega_hat(Complex::new(alpha, 0.0), spec)?;
        for &r in rs {
            let out_table = omega.product(&bessel_potential_table(r, spec)?)?;
            let outputs = spectra
                .par_iter()
                .map(|s| multiply_back(s, &out_table))
                .collect::<Result<Vec<_>>>()?;
            for s in ss {
                let s_total: f64 = s.iter().sum();
                let b_s = MultiplierTable::<f64>::b_s(s, spec)?;
                let inputs = spectra.par_iter().map(|f| multiply_back(f, &b_s)).collect::<Result<Vec<_>>>()?;
                for &p in ps {
                    let pe = LpExponent::new(p)?;
                    let ratios = outputs
                        .par_iter()
                        .zip(inputs.par_iter())
                        .map(|(o, i)| Ok(lp_norm(o, pe)? / lp_norm(i, pe)?))
                        .collect::<Result<Vec<f64>>>()?;
                    let ratio_max = ratios.iter().cloned().fold(0.0, f64::max);
                    let knapp_slope = if family == Family::Knapp && ratios.len() >= 2 {
                        let js: Vec<f64> = members.iter().map(|(j, _)| *j as f64).collect();
                        let ys: Vec<f64> = ratios.iter().map(|v| v.log2()).collect();
                        fit_line(&js, &ys).map(|f| f.slope())
                    } else {
                        None
                    };
                    rows.push(SweepRow {
                        alpha,
                        r,
                        s_total,
                        p,
                        ratio_max,
                        inside_theory: inside_theory(alpha, r, s_total, p, dim),
                        knapp_slope,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn multiply_back(spectrum: &Field<f64>, table: &MultiplierTable<f64>) -> Result<Field<f64>> {
    let values = spectrum.values().iter().zip(table.values()).map(|(&a, &b)| a * b).collect();
    Field::new(spectrum.spec().clone(), Side::Frequency, values)?.transform(Direction::Inverse)
}
