//! Localized kernels
//! `Lambda_tj(x, y) = int e^{2 pi i (x.xi +- |xi| - y.xi)} delta_t(xi) phi_j(xi) sigma(xi) dxi`
//! synthesized by inverse FFT, and scans of their L1 size, modulus of
//! continuity in `y`, and mass outside the region of influence.
//!
//! The phase is linear in `x - y`, so `Lambda(x, y) = K(x - y)`. Only the
//! spectrum of `K` is built; shifts by `y` multiply it by `e^{-2 pi i y.xi}`.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomp::{
    block_norms, bump, classify_partition, cone_cutoff, cone_total, shell_cutoff, InfluenceRegion, PartitionSplit,
};
use crate::error::{Error, Result};
use crate::grid::{Direction, Field, GridSpec, Side};
use crate::multipliers::{PhaseSign, SigmaSymbol, C64};
use crate::stats::{fit_line, regress, spread};

/// Amplitude `sigma` of the localized kernels.
#[derive(Clone, Debug)]
pub enum KernelSymbol {
    /// `prod_i (1 + |xi_i|^2)^{-rho_i/2}`, a model member of `S^{-|rho|}_rho`.
    Product { rho: Vec<f64> },
    /// One branch of the large-frequency amplitude of `omega_hat`.
    Sigma { symbol: SigmaSymbol, branch: PhaseSign },
}

impl KernelSymbol {
    pub fn product(rho: &[f64]) -> Self {
        KernelSymbol::Product { rho: rho.to_vec() }
    }

    fn eval(&self, xi_norm: f64, norms: &[f64]) -> C64 {
        match self {
            KernelSymbol::Product { rho } => Complex::new(
                rho.iter().zip(norms).map(|(&r, &x)| (1.0 + x * x).powf(-r / 2.0)).product(),
                0.0,
            ),
            KernelSymbol::Sigma { symbol, branch } => symbol.eval_norms(xi_norm, norms, *branch),
        }
    }
}

/// Grid and symbol shared by every kernel of a scan.
#[derive(Clone, Debug)]
pub struct KernelSetup {
    pub factors: Vec<usize>,
    pub half_width: f64,
    /// Samples per axis relative to the minimum `4L 2^{j+1}`.
    pub oversample: f64,
    pub symbol: KernelSymbol,
    pub sign: PhaseSign,
}

impl KernelSetup {
    pub fn new(factors: &[usize], half_width: f64, symbol: KernelSymbol) -> Self {
        Self { factors: factors.to_vec(), half_width, oversample: 1.0, symbol, sign: PhaseSign::Plus }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().sum()
    }

    /// Smallest grid whose Nyquist frequency `M/(4L)` reaches the outer
    /// shell edge `2^{j+1}`, times the oversampling factor.
    pub fn grid_for(&self, j: u32) -> Result<GridSpec> {
        let need = 4.0 * self.half_width * 2f64.powi(j as i32 + 1) * self.oversample.max(1.0);
        let mut m = need.ceil() as usize;
        m += m % 2;
        GridSpec::new(self.dim(), &self.factors, m.max(4), self.half_width)
    }
}

/// Required samples per axis for shell `j` at half width `L`.
pub fn required_samples(j: u32, half_width: f64) -> usize {
    let m = (4.0 * half_width * 2f64.powi(j as i32 + 1)).ceil() as usize;
    m + m % 2
}

fn check_nyquist(j: u32, spec: &GridSpec) -> Result<()> {
    if spec.nyquist() < 2f64.powi(j as i32 + 1) {
        let need = required_samples(j, spec.half_width());
        return Err(Error::Resolution {
            reason: format!(
                "shell j = {j} reaches |xi| = {} but the grid Nyquist is {}",
                2f64.powi(j as i32 + 1),
                spec.nyquist()
            ),
            required_samples: need,
        });
    }
    Ok(())
}

/// Spectrum `e^{+-2 pi i|xi|} phi_j(xi) sigma(xi)` of one shell, reused for
/// every cone index; the cone cutoff is applied per `t`.
pub struct ShellSpectrum {
    spec: GridSpec,
    j: u32,
    base: Vec<C64>,
    norms: Vec<f64>,
}

impl ShellSpectrum {
    pub fn new(j: u32, spec: &GridSpec, symbol: &KernelSymbol, sign: PhaseSign) -> Result<Self> {
        check_nyquist(j, spec)?;
        let factors = spec.factors().to_vec();
        let nb = factors.len();
        let n = spec.dim_total();
        let len = spec.len();
        let mut norms = vec![0.0; len * nb];
        let mut base = vec![Complex::new(0.0, 0.0); len];
        base.par_iter_mut().zip(norms.par_chunks_mut(nb)).enumerate().for_each_init(
            || vec![0.0; n],
            |xi, (flat, (b, nr))| {
                spec.frequency_point(flat, xi);
                block_norms(&factors, xi, nr);
                let xn = nr.iter().map(|v| v * v).sum::<f64>().sqrt();
                let shell = shell_cutoff(j as i32, xn);
                if shell == 0.0 {
                    return;
                }
                let phase = Complex::new(0.0, sign.value() * 2.0 * PI * xn).exp();
                *b = phase * symbol.eval(xn, nr) * shell;
            },
        );
        Ok(Self { spec: spec.clone(), j, base, norms })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Spectrum of `K` for cone index `t`.
    pub fn spectrum(&self, t: &[u32]) -> Result<Vec<C64>> {
        let nb = self.spec.factors().len();
        if t.len() + 1 != nb {
            return Err(Error::Contract(format!("cone index has {} entries for {nb} blocks", t.len())));
        }
        Ok(self
            .base
            .par_iter()
            .zip(self.norms.par_chunks(nb))
            .map(|(&b, nr)| {
                if b == Complex::new(0.0, 0.0) {
                    return b;
                }
                b * cone_cutoff(t, nr).unwrap_or(0.0)
            })
            .collect())
    }

    /// Sum of the spectra over `t_i <= cap` in closed (telescoped) form.
    pub fn capped_spectrum(&self, cap: u32) -> Vec<C64> {
        let nb = self.spec.factors().len();
        self.base
            .par_iter()
            .zip(self.norms.par_chunks(nb))
            .map(|(&b, nr)| b * cone_total(Some(cap), nr))
            .collect()
    }
}

/// Physical kernel from a spectrum, optionally translated by `y`.
pub fn synthesize(spec: &GridSpec, spectrum: &[C64], y: Option<&[f64]>) -> Result<Field<f64>> {
    let n = spec.dim_total();
    let values: Vec<C64> = match y {
        None => spectrum.to_vec(),
        Some(y) => spectrum
            .par_iter()
            .enumerate()
            .map_init(
                || vec![0.0; n],
                |xi, (flat, &v)| {
                    if v == Complex::new(0.0, 0.0) {
                        return v;
                    }
                    spec.frequency_point(flat, xi);
                    let dot: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
                    v * Complex::new(0.0, -2.0 * PI * dot).exp()
                },
            )
            .collect(),
    };
    Field::new(spec.clone(), Side::Frequency, values)?.transform(Direction::Inverse)
}

/// `Lambda_tj(., 0)` on `spec`.
pub fn lambda_kernel(j: u32, t: &[u32], symbol: &KernelSymbol, sign: PhaseSign, spec: &GridSpec) -> Result<Field<f64>> {
    let shell = ShellSpectrum::new(j, spec, symbol, sign)?;
    synthesize(spec, &shell.spectrum(t)?, None)
}

pub fn l1_mass(k: &Field<f64>) -> f64 {
    k.values().par_iter().map(|v| v.norm()).sum::<f64>() * k.spec().cell_volume()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    L1,
    Diff,
    Tail,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelScanRow {
    pub mode: ScanMode,
    pub j: u32,
    pub t: Vec<u32>,
    pub partition: PartitionSplit,
    pub samples_per_axis: usize,
    pub y: Vec<f64>,
    pub r: Option<f64>,
    pub c: Option<f64>,
    pub l1_mass: f64,
    /// `l1_mass`, `diff_mass` or `tail_mass` depending on the mode.
    pub measured: f64,
    /// Envelope without its constant.
    pub predicted: f64,
    pub ratio: f64,
}

/// `prod_{i in blocks} 2^{-N_i t_i/2}`; blocks numbered from 2.
fn cone_weight(t: &[u32], factors: &[usize], blocks: impl Iterator<Item = usize>) -> f64 {
    blocks.map(|b| 2f64.powf(-(factors[b - 1] as f64) * t[b - 2] as f64 / 2.0)).product()
}

/// Every `t` with `0 <= t_i <= floor(j/2) - 1`, inside the regime where
/// all blocks belong to I.
pub fn cone_indices_first(j: u32, blocks: usize) -> Vec<Vec<u32>> {
    all_indices((j / 2).saturating_sub(1), blocks)
}

/// L1 size of `Lambda_tj(., 0)` for every listed `(j, t)`.
pub fn l1_scan(setup: &KernelSetup, jobs: &[(u32, Vec<Vec<u32>>)]) -> Result<Vec<KernelScanRow>> {
    let mut rows = Vec::new();
    for (j, ts) in jobs {
        let spec = setup.grid_for(*j)?;
        let shell = ShellSpectrum::new(*j, &spec, &setup.symbol, setup.sign)?;
        for t in ts {
            let part = classify_partition(*j, t, &setup.factors)?;
            let k = synthesize(&spec, &shell.spectrum(t)?, None)?;
            let mass = l1_mass(&k);
            let predicted = cone_weight(t, &setup.factors, part.first.iter().copied());
            rows.push(KernelScanRow {
                mode: ScanMode::L1,
                j: *j,
                t: t.clone(),
                partition: part,
                samples_per_axis: spec.samples_per_axis(),
                y: vec![0.0; spec.dim_total()],
                r: None,
                c: None,
                l1_mass: mass,
                measured: mass,
                predicted,
                ratio: mass / predicted,
            });
        }
    }
    Ok(rows)
}

/// `integral |Lambda(x, y) - Lambda(x, 0)| dx` for each `y`, against
/// `2^j |y| prod_i 2^{-N_i t_i/2}`.
pub fn diff_scan(setup: &KernelSetup, j: u32, t: &[u32], ys: &[Vec<f64>]) -> Result<Vec<KernelScanRow>> {
    let spec = setup.grid_for(j)?;
    let shell = ShellSpectrum::new(j, &spec, &setup.symbol, setup.sign)?;
    let spectrum = shell.spectrum(t)?;
    let k0 = synthesize(&spec, &spectrum, None)?;
    let mass0 = l1_mass(&k0);
    let part = classify_partition(j, t, &setup.factors)?;
    let weight = cone_weight(t, &setup.factors, 2..=setup.factors.len());
    ys.iter()
        .map(|y| {
            if y.len() != spec.dim_total() {
                return Err(Error::Contract(format!("shift has {} components in R^{}", y.len(), spec.dim_total())));
            }
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let measured = if ny == 0.0 {
                0.0
            } else {
                let ky = synthesize(&spec, &spectrum, Some(y))?;
                l1_mass(&ky.sub(&k0)?)
            };
            let predicted = 2f64.powi(j as i32) * ny * weight;
            Ok(KernelScanRow {
                mode: ScanMode::Diff,
                j,
                t: t.to_vec(),
                partition: part.clone(),
                samples_per_axis: spec.samples_per_axis(),
                y: y.clone(),
                r: None,
                c: None,
                l1_mass: mass0,
                measured,
                predicted,
                ratio: if predicted > 0.0 { measured / predicted } else { 0.0 },
            })
        })
        .collect()
}

/// Mass of `Lambda(., y)` outside `Q_r` (constant `c`) against
/// `(2^{-j}/r) prod_i 2^{-N_i t_i/2}`. Requires `2^j > 1/r`.
pub fn tail_scan(
    setup: &KernelSetup,
    j: u32,
    t: &[u32],
    r: f64,
    c: f64,
    ys: &[Vec<f64>],
) -> Result<Vec<KernelScanRow>> {
    if !(2f64.powi(j as i32) > 1.0 / r) {
        return Err(Error::Domain(format!(
            "tail estimate holds whenever 2^j > 1/r; got 2^{j} <= 1/r = {}",
            1.0 / r
        )));
    }
    let spec = setup.grid_for(j)?;
    let region = InfluenceRegion::new(r, c, spec.dim_total(), crate::decomp::region::DEFAULT_DEPTH, setup.sign)?;
    let outside = outside_mask(&spec, &region);
    tail_rows(setup, j, t, r, c, ys, &spec, &outside)
}

/// Grid points outside the region.
pub fn outside_mask(spec: &GridSpec, region: &InfluenceRegion) -> Vec<bool> {
    let n = spec.dim_total();
    (0..spec.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |x, flat| {
                spec.point(flat, x);
                !region.contains(x)
            },
        )
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn tail_rows(
    setup: &KernelSetup,
    j: u32,
    t: &[u32],
    r: f64,
    c: f64,
    ys: &[Vec<f64>],
    spec: &GridSpec,
    outside: &[bool],
) -> Result<Vec<KernelScanRow>> {
    let shell = ShellSpectrum::new(j, spec, &setup.symbol, setup.sign)?;
    let spectrum = shell.spectrum(t)?;
    let part = classify_partition(j, t, &setup.factors)?;
    let weight = cone_weight(t, &setup.factors, 2..=setup.factors.len());
    let predicted = 2f64.powi(-(j as i32)) / r * weight;
    ys.iter()
        .map(|y| {
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if ny >= r {
                return Err(Error::Domain(format!("shift |y| = {ny} must lie in the ball of radius r = {r}")));
            }
            let k = synthesize(spec, &spectrum, if ny == 0.0 { None } else { Some(y) })?;
            let dv = spec.cell_volume();
            let total = l1_mass(&k);
            let tail: f64 = k
                .values()
                .par_iter()
                .zip(outside.par_iter())
                .filter(|(_, &o)| o)
                .map(|(v, _)| v.norm())
                .sum::<f64>()
                * dv;
            Ok(KernelScanRow {
                mode: ScanMode::Tail,
                j,
                t: t.to_vec(),
                partition: part.clone(),
                samples_per_axis: spec.samples_per_axis(),
                y: y.clone(),
                r: Some(r),
                c: Some(c),
                l1_mass: total,
                measured: tail,
                predicted,
                ratio: tail / predicted,
            })
        })
        .collect()
}

/// Tail rows for several `(j, t)` sharing one `r` and `c`.
pub fn tail_scan_many(
    setup: &KernelSetup,
    jobs: &[(u32, Vec<Vec<u32>>)],
    r: f64,
    c: f64,
    ys: &[Vec<f64>],
) -> Result<Vec<KernelScanRow>> {
    let mut rows = Vec::new();
    for (j, ts) in jobs {
        if !(2f64.powi(*j as i32) > 1.0 / r) {
            return Err(Error::Domain(format!(
                "tail estimate holds whenever 2^j > 1/r; got 2^{j} <= 1/r = {}",
                1.0 / r
            )));
        }
        let spec = setup.grid_for(*j)?;
        let region = InfluenceRegion::new(r, c, spec.dim_total(), crate::decomp::region::DEFAULT_DEPTH, setup.sign)?;
        let outside = outside_mask(&spec, &region);
        for t in ts {
            rows.extend(tail_rows(setup, *j, t, r, c, ys, &spec, &outside)?);
        }
    }
    Ok(rows)
}

/// Fitted law `log2 l1_mass ~ c0 + sum_i b_i t_i + g j`.
#[derive(Clone, Debug, Serialize)]
pub struct L1Law {
    /// One slope per block `2..=n`; the prediction is `-N_i/2`.
    pub t_slopes: Vec<f64>,
    pub j_slope: f64,
    pub r_squared: f64,
    /// Slope of `log2 l1_mass` against `j` over the `t = 0` rows.
    pub t0_j_slope: f64,
}

pub fn fit_l1_law(rows: &[KernelScanRow]) -> Option<L1Law> {
    let nb = rows.first()?.t.len();
    let x: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<f64> = r.t.iter().map(|&t| t as f64).collect();
            v.push(r.j as f64);
            v
        })
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.l1_mass.log2()).collect();
    let fit = regress(&x, &y)?;
    let zero: Vec<&KernelScanRow> = rows.iter().filter(|r| r.t.iter().all(|&t| t == 0)).collect();
    let t0 = fit_line(
        &zero.iter().map(|r| r.j as f64).collect::<Vec<_>>(),
        &zero.iter().map(|r| r.l1_mass.log2()).collect::<Vec<_>>(),
    )?;
    Some(L1Law {
        t_slopes: fit.coefficients[1..=nb].to_vec(),
        j_slope: fit.coefficients[nb + 1],
        r_squared: fit.r_squared,
        t0_j_slope: t0.slope(),
    })
}

/// Largest `max/min` of `ratio` over groups of rows sharing `(j, t)`.
pub fn worst_group_spread(rows: &[KernelScanRow]) -> f64 {
    let mut keys: Vec<(u32, Vec<u32>)> = rows.iter().map(|r| (r.j, r.t.clone())).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|(j, t)| {
            let v: Vec<f64> = rows.iter().filter(|r| r.j == *j && &r.t == t).map(|r| r.ratio).collect();
            spread(&v)
        })
        .fold(1.0, f64::max)
}

/// Shifts `2^{-j-3}, ..., 2^{-j}` along the first axis, the second axis and
/// the diagonal of the first two axes.
pub fn diff_shifts(j: u32, dim: usize) -> Vec<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = {
        let mut e1 = vec![0.0; dim];
        e1[0] = 1.0;
        let mut e2 = vec![0.0; dim];
        e2[1.min(dim - 1)] = 1.0;
        let mut d = vec![0.0; dim];
        d[0] = 0.5f64.sqrt();
        d[1.min(dim - 1)] += 0.5f64.sqrt();
        vec![e1, e2, d]
    };
    let mut out = Vec::new();
    for dir in &dirs {
        for k in 0..4 {
            let len = 2f64.powi(-(j as i32) - 3 + k);
            out.push(dir.iter().map(|v| v * len).collect());
        }
    }
    out
}

/// Applies the sum of the kernels over `j in j_range`, `t_i <= cap` to `f`
/// and, separately, the telescoped multiplier
/// `[phi(2^{-J}|xi|) - phi(2^{1-j0}|xi|)] Delta_cap sigma e^{+-2 pi i|xi|}`.
/// Returns the largest pointwise difference relative to the output size.
pub fn reconstruction_error(
    setup: &KernelSetup,
    spec: &GridSpec,
    j_range: std::ops::RangeInclusive<u32>,
    cap: u32,
    f: &Field<f64>,
) -> Result<f64> {
    let nb = setup.factors.len();
    let f_hat = f.transform(Direction::Forward)?;
    let mut summed = vec![Complex::new(0.0, 0.0); spec.len()];
    let (j0, j1) = (*j_range.start(), *j_range.end());
    for j in j_range {
        let shell = ShellSpectrum::new(j, spec, &setup.symbol, setup.sign)?;
        for t in all_indices(cap, nb - 1) {
            let s = shell.spectrum(&t)?;
            summed.par_iter_mut().zip(s.par_iter()).for_each(|(a, b)| *a += b);
        }
    }
    let n = spec.dim_total();
    let factors = spec.factors().to_vec();
    let closed: Vec<C64> = (0..spec.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; nb]),
            |(xi, nr), flat| {
                spec.frequency_point(flat, xi);
                block_norms(&factors, xi, nr);
                let xn = nr.iter().map(|v| v * v).sum::<f64>().sqrt();
                let shells = bump(2f64.powi(-(j1 as i32)) * xn) - bump(2f64.powi(1 - j0 as i32) * xn);
                if shells == 0.0 {
                    return Complex::new(0.0, 0.0);
                }
                let phase = Complex::new(0.0, setup.sign.value() * 2.0 * PI * xn).exp();
                phase * setup.symbol.eval(xn, nr) * shells * cone_total(Some(cap), nr)
            },
        )
        .collect();
    let apply = |m: &[C64]| -> Result<Field<f64>> {
        let v: Vec<C64> = f_hat.values().iter().zip(m).map(|(&a, &b)| a * b).collect();
        Field::new(spec.clone(), Side::Frequency, v)?.transform(Direction::Inverse)
    };
    let a = apply(&summed)?;
    let b = apply(&closed)?;
    let scale = b.sup_norm().max(f64::MIN_POSITIVE);
    Ok(a.sub(&b)?.sup_norm() / scale)
}

fn all_indices(cap: u32, blocks: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..blocks {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=cap).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
