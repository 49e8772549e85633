//! Spectral Duhamel solver for `u_tt - Lap u = g` on the torus with zero
//! initial data, its residual, and the a priori gradient-versus-Sobolev
//! probe.
//!
//! Each Fourier mode solves `u'' + w^2 u = g^` with `w = 2 pi |xi|`, so
//! `u^(t) = int_0^t sin(w(t-tau))/w g^(tau) dtau`. The integral is a
//! composite trapezoid on the uniform time grid; splitting
//! `sin(w(t-tau)) = sin(wt)cos(w tau) - cos(wt)sin(w tau)` turns all time
//! levels into running sums.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, Direction, Field, GridSpec, Side};
use crate::multipliers::{MultiplierTable, PhaseSign};
use crate::scalar::{lit, Real};
use crate::sobolev::{sobolev_norm_with, SobolevParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveConfig {
    pub spec: GridSpec,
    pub t_final: f64,
    pub steps: usize,
    pub phase_sign: PhaseSign,
}

impl WaveConfig {
    pub fn new(spec: GridSpec, t_final: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Validation { field: "steps", reason: format!("need at least 2, got {steps}") });
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Validation { field: "T", reason: format!("must be positive, got {t_final}") });
        }
        Ok(Self { spec, t_final, steps, phase_sign: PhaseSign::Plus })
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    /// Time levels `0, dt, ..., T`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|n| n as f64 * self.dt()).collect()
    }
}

/// `sin(2 pi tau |xi|) / (2 pi |xi|)`, equal to `tau` at `xi = 0`.
pub fn propagator_hat(tau: f64, xi_norm: f64) -> f64 {
    let w = 2.0 * PI * xi_norm;
    if w * tau.abs() < 1e-8 {
        return tau * (1.0 - (w * tau).powi(2) / 6.0);
    }
    (w * tau).sin() / w
}

/// One phase branch `sign e^{sign 2 pi i tau|xi|} / (2i 2 pi |xi|)`; the two
/// branches add up to [`propagator_hat`].
pub fn propagator_branch(tau: f64, xi_norm: f64, sign: PhaseSign) -> Complex<f64> {
    let w = 2.0 * PI * xi_norm;
    if w == 0.0 {
        return Complex::new(tau / 2.0, 0.0);
    }
    let s = sign.value();
    Complex::new(0.0, s * w * tau).exp() * s / Complex::new(0.0, 2.0 * w)
}

fn check_slices<T: Real>(fields: &[Field<T>], config: &WaveConfig, what: &str) -> Result<()> {
    if fields.len() != config.steps + 1 {
        return Err(Error::Contract(format!(
            "{what} has {} time slices, the time grid has {}",
            fields.len(),
            config.steps + 1
        )));
    }
    for f in fields {
        if f.spec() != &config.spec || f.side() != Side::Physical {
            return Err(Error::Contract(format!("{what} slices must be physical fields on the config grid")));
        }
    }
    Ok(())
}

/// Solution at every time level of the config, starting with `u(0) = 0`.
pub fn solve_wave<T: Real>(g: &[Field<T>], config: &WaveConfig) -> Result<Vec<Field<T>>> {
    check_slices(g, config, "forcing")?;
    let spectra = g
        .iter()
        .map(|f| f.transform(Direction::Forward))
        .collect::<Result<Vec<_>>>()?;
    let len = config.spec.len();
    let levels = config.steps + 1;
    let dt = config.dt();
    let half_dt = lit::<T>(dt / 2.0);
    let n = config.spec.dim_total();

    // mode-major output so each mode is processed by one task
    let mut out = vec![Complex::new(T::zero(), T::zero()); len * levels];
    out.par_chunks_mut(levels).enumerate().for_each(|(mode, u)| {
        let mut xi = vec![0.0; n];
        config.spec.frequency_point(mode, &mut xi);
        let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = 2.0 * PI * xn;
        let mut c_sum = Complex::new(T::zero(), T::zero());
        let mut s_sum = Complex::new(T::zero(), T::zero());
        let mut prev_c = Complex::new(T::zero(), T::zero());
        let mut prev_s = Complex::new(T::zero(), T::zero());
        for (k, uk) in u.iter_mut().enumerate() {
            let t = k as f64 * dt;
            let gk = spectra[k].values()[mode];
            // cos/sin weights, or 1 and tau at the zero mode
            let (cw, sw) = if w == 0.0 { (1.0, t) } else { ((w * t).cos(), (w * t).sin()) };
            let cur_c = gk * lit::<T>(cw);
            let cur_s = gk * lit::<T>(sw);
            if k > 0 {
                c_sum = c_sum + (prev_c + cur_c) * half_dt;
                s_sum = s_sum + (prev_s + cur_s) * half_dt;
            }
            prev_c = cur_c;
            prev_s = cur_s;
            *uk = if w == 0.0 {
                c_sum * lit::<T>(t) - s_sum
            } else {
                (c_sum * lit::<T>(sw) - s_sum * lit::<T>(cw)) / lit::<T>(w)
            };
        }
    });

    (0..levels)
        .into_par_iter()
        .map(|k| {
            let values = (0..len).map(|mode| out[mode * levels + k]).collect();
            Field::new(config.spec.clone(), Side::Frequency, values)?.transform(Direction::Inverse)
        })
        .collect()
}

/// Spectral Laplacian of a physical field.
pub fn laplacian<T: Real>(u: &Field<T>) -> Result<Field<T>> {
    let table = MultiplierTable::<T>::from_fn(u.spec().clone(), crate::multipliers::Provenance::Custom, |xi| {
        Complex::new(-(2.0 * PI).powi(2) * xi.iter().map(|v| v * v).sum::<f64>(), 0.0)
    })?;
    crate::multipliers::apply_multiplier(u, &table)
}

/// Spectral partial derivatives `d_a u` for every axis.
pub fn gradient<T: Real>(u: &Field<T>) -> Result<Vec<Field<T>>> {
    let n = u.spec().dim_total();
    (0..n)
        .map(|a| {
            let table =
                MultiplierTable::<T>::from_fn(u.spec().clone(), crate::multipliers::Provenance::Custom, |xi| {
                    Complex::new(0.0, 2.0 * PI * xi[a])
                })?;
            crate::multipliers::apply_multiplier(u, &table)
        })
        .collect()
}

/// `(u_{n+1} - 2u_n + u_{n-1})/dt^2 - Lap u_n - g_n` at the interior levels
/// `n = 1, ..., steps-1`.
pub fn residual<T: Real>(u: &[Field<T>], g: &[Field<T>], config: &WaveConfig) -> Result<Vec<Field<T>>> {
    if u.len() < 3 {
        return Err(Error::Contract(format!("residual needs at least 3 time slices, got {}", u.len())));
    }
    check_slices(u, config, "solution")?;
    check_slices(g, config, "forcing")?;
    let inv_dt2 = lit::<T>(1.0 / config.dt().powi(2));
    (1..config.steps)
        .into_par_iter()
        .map(|k| {
            let lap = laplacian(&u[k])?;
            let values = u[k + 1]
                .values()
                .iter()
                .zip(u[k].values())
                .zip(u[k - 1].values())
                .zip(lap.values())
                .zip(g[k].values())
                .map(|((((&up, &uc), &um), &l), &gv)| (up - uc * lit::<T>(2.0) + um) * inv_dt2 - l - gv)
                .collect();
            Field::new(config.spec.clone(), Side::Physical, values)
        })
        .collect()
}

/// `sqrt(sum_n ||f_n||_2^2 dt)`, the space-time L2 norm of a slice list.
pub fn space_time_l2<T: Real>(fields: &[Field<T>], dt: f64) -> f64 {
    let s: f64 = fields.iter().map(|f| f.l2_norm().to_f64().unwrap_or(f64::NAN).powi(2)).sum();
    (s * dt).sqrt()
}

/// `u*(x,t) = sin(2 pi k.x) sin^2(omega t)`, which has `u = u_t = 0` at
/// `t = 0`, and its forcing
/// `g = sin(2 pi k.x) [2 omega^2 cos(2 omega t) + (2 pi |k|)^2 sin^2(omega t)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    /// Spatial frequency; must be a grid frequency for periodicity.
    pub k: Vec<f64>,
    pub omega: f64,
}

impl Manufactured {
    fn spatial(&self, x: &[f64]) -> f64 {
        (2.0 * PI * self.k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).sin()
    }

    pub fn u(&self, x: &[f64], t: f64) -> f64 {
        self.spatial(x) * (self.omega * t).sin().powi(2)
    }

    pub fn g(&self, x: &[f64], t: f64) -> f64 {
        let k2 = (2.0 * PI).powi(2) * self.k.iter().map(|v| v * v).sum::<f64>();
        let w = self.omega;
        self.spatial(x) * (2.0 * w * w * (2.0 * w * t).cos() + k2 * (w * t).sin().powi(2))
    }

    pub fn sample_u<T: Real>(&self, config: &WaveConfig) -> Vec<Field<T>> {
        sample_slices(config, |x, t| self.u(x, t))
    }

    pub fn sample_g<T: Real>(&self, config: &WaveConfig) -> Vec<Field<T>> {
        sample_slices(config, |x, t| self.g(x, t))
    }
}

/// Real space-time function sampled at every time level.
pub fn sample_slices<T: Real, F>(config: &WaveConfig, f: F) -> Vec<Field<T>>
where
    F: Fn(&[f64], f64) -> f64 + Sync,
{
    config
        .times()
        .into_iter()
        .map(|t| Field::from_fn(config.spec.clone(), |x| Complex::new(lit(f(x, t)), T::zero())))
        .collect()
}

/// Relative space-time L2 error of `solve_wave` against `u*`.
pub fn manufactured_error(m: &Manufactured, config: &WaveConfig) -> Result<f64> {
    let g = m.sample_g::<f64>(config);
    let u = solve_wave(&g, config)?;
    let exact = m.sample_u::<f64>(config);
    let diff = u.iter().zip(&exact).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
    Ok(space_time_l2(&diff, config.dt()) / space_time_l2(&exact, config.dt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AprioriRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Checks `0 <= |s| < (N-1)/2` and `|1/2 - 1/p| <= |s|/(N-1)`.
pub fn apriori_window(dim: usize, params: &SobolevParams) -> Result<()> {
    let n1 = dim as f64 - 1.0;
    if !(params.s_total >= 0.0 && params.s_total < n1 / 2.0) {
        return Err(Error::Domain(format!(
            "a priori estimate needs 0 <= |s| < (N-1)/2 = {}, got |s| = {}",
            n1 / 2.0,
            params.s_total
        )));
    }
    let gap = (0.5 - 1.0 / params.p).abs();
    if gap > params.s_total / n1 + 1e-15 {
        return Err(Error::Domain(format!(
            "a priori estimate needs |1/2 - 1/p| <= |s|/(N-1): {gap} > {}",
            params.s_total / n1
        )));
    }
    Ok(())
}

/// Per time level, `lhs = ||grad u(t)||_p` and
/// `rhs = int_0^t ||g(t - r)||_{L^p_s} dr` (trapezoid), with `u` from
/// [`solve_wave`].
pub fn apriori_check<T: Real>(g: &[Field<T>], params: &SobolevParams, config: &WaveConfig) -> Result<Vec<AprioriRow>> {
    apriori_window(config.spec.dim_total(), params)?;
    let u = solve_wave(g, config)?;
    let b_s = MultiplierTable::<T>::b_s(&params.s, &config.spec)?;
    let p = params.exponent();
    let g_norms = g
        .par_iter()
        .map(|f| sobolev_norm_with(f, &b_s, p).map(|v| v.to_f64().unwrap_or(f64::NAN)))
        .collect::<Result<Vec<_>>>()?;
    let dt = config.dt();
    let mut rows = Vec::with_capacity(u.len());
    let mut acc = 0.0;
    for (k, uk) in u.iter().enumerate() {
        if k > 0 {
            acc += dt / 2.0 * (g_norms[k - 1] + g_norms[k]);
        }
        let grad = gradient(uk)?;
        let mut mag = Field::<T>::zeros(config.spec.clone(), Side::Physical);
        mag.values_mut().par_iter_mut().enumerate().for_each(|(i, v)| {
            let s = grad.iter().fold(T::zero(), |a, d| a + d.values()[i].norm_sqr());
            *v = Complex::new(s.sqrt(), T::zero());
        });
        let lhs = lp_norm(&mag, p)?.to_f64().unwrap_or(f64::NAN);
        let ratio = if acc > 0.0 { lhs / acc } else { 0.0 };
        rows.push(AprioriRow { t: k as f64 * dt, lhs, rhs: acc, ratio });
    }
    Ok(rows)
}
