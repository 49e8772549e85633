//! Periodic discretization of R^N with a product splitting
//! R^N = R^{N_1} x ... x R^{N_n}, Fourier transforms with integral
//! normalization, and iterated mixed Lebesgue norms.
//!
//! Samples are stored row-major with axis 0 slowest, so factor block `n`
//! occupies the innermost `M^{N_n}` entries. Physical sample `i` on an axis
//! sits at `x = -L + i*2L/M`. Spectra are stored in FFT order: index `k`
//! stands for the signed frequency `k/(2L)` when `k < M/2` and `(k-M)/(2L)`
//! otherwise.

use std::ops::Range;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim_total: usize,
    factors: Vec<usize>,
    samples_per_axis: usize,
    half_width: f64,
}

/// Validating constructor; see [`GridSpec::new`].
pub fn make_grid(
    dim_total: usize,
    factors: &[usize],
    samples_per_axis: usize,
    half_width: f64,
) -> Result<GridSpec> {
    GridSpec::new(dim_total, factors, samples_per_axis, half_width)
}

impl GridSpec {
    pub fn new(
        dim_total: usize,
        factors: &[usize],
        samples_per_axis: usize,
        half_width: f64,
    ) -> Result<Self> {
        if dim_total == 0 {
            return Err(invalid("dim_total", "must be positive"));
        }
        if factors.is_empty() || factors.iter().any(|&f| f == 0) {
            return Err(invalid("factors", "every factor must be at least 1"));
        }
        let sum: usize = factors.iter().sum();
        if sum != dim_total {
            return Err(invalid(
                "factors",
                format!("factors sum {sum} != dim_total {dim_total}"),
            ));
        }
        if samples_per_axis < 4 || samples_per_axis % 2 != 0 {
            return Err(invalid(
                "samples_per_axis",
                format!("must be even and at least 4, got {samples_per_axis}"),
            ));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(invalid("half_width", format!("must be positive, got {half_width}")));
        }
        samples_per_axis
            .checked_pow(dim_total as u32)
            .ok_or_else(|| invalid("samples_per_axis", "M^N overflows"))?;
        Ok(Self { dim_total, factors: factors.to_vec(), samples_per_axis, half_width })
    }

    pub fn dim_total(&self) -> usize {
        self.dim_total
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Total number of grid points, `M^N`.
    pub fn len(&self) -> usize {
        self.samples_per_axis.pow(self.dim_total as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples_per_axis as f64
    }

    pub fn frequency_spacing(&self) -> f64 {
        1.0 / (2.0 * self.half_width)
    }

    /// Largest representable frequency magnitude per axis, `M/(4L)`.
    pub fn nyquist(&self) -> f64 {
        self.samples_per_axis as f64 / (4.0 * self.half_width)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim_total as i32)
    }

    pub fn frequency_cell_volume(&self) -> f64 {
        self.frequency_spacing().powi(self.dim_total as i32)
    }

    pub fn torus_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim_total as i32)
    }

    /// Axis ranges belonging to each factor block.
    pub fn block_axes(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.factors
            .iter()
            .map(|&f| {
                let r = start..start + f;
                start += f;
                r
            })
            .collect()
    }

    /// Same geometry with a different sample count.
    pub fn with_samples(&self, samples_per_axis: usize) -> Result<Self> {
        Self::new(self.dim_total, &self.factors, samples_per_axis, self.half_width)
    }

    /// Same geometry with a different half width.
    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Self::new(self.dim_total, &self.factors, self.samples_per_axis, half_width)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Signed integer frequency of FFT-order index `k`.
    pub fn signed_index(&self, k: usize) -> isize {
        let m = self.samples_per_axis;
        if k < m / 2 {
            k as isize
        } else {
            k as isize - m as isize
        }
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 * self.frequency_spacing()
    }

    /// Writes the multi-index of `flat` into `out` (axis 0 first).
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        let m = self.samples_per_axis;
        for slot in out.iter_mut().rev() {
            *slot = flat % m;
            flat /= m;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.samples_per_axis + i)
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.dim_total];
        self.unravel(flat, &mut idx);
        for (o, &i) in out.iter_mut().zip(&idx) {
            *o = self.coordinate(i);
        }
    }

    /// Frequency coordinates of FFT-order point `flat`.
    pub fn frequency_point(&self, flat: usize, out: &mut [f64]) {
        let mut idx = vec![0; self.dim_total];
        self.unravel(flat, &mut idx);
        for (o, &k) in out.iter_mut().zip(&idx) {
            *o = self.frequency(k);
        }
    }

    /// Per-axis coordinate tables (physical side).
    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.samples_per_axis).map(|i| self.coordinate(i)).collect()
    }

    /// Per-axis frequency tables in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.samples_per_axis).map(|k| self.frequency(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Physical,
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Physical to frequency, kernel `e^{-2 pi i x.xi}`.
    Forward,
    /// Frequency to physical, kernel `e^{+2 pi i x.xi}`.
    Inverse,
}

impl Direction {
    fn source(self) -> Side {
        match self {
            Direction::Forward => Side::Physical,
            Direction::Inverse => Side::Frequency,
        }
    }
}

/// Complex samples of a function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    spec: GridSpec,
    values: Vec<Complex<T>>,
    side: Side,
}

impl<T: Real> Field<T> {
    pub fn new(spec: GridSpec, side: Side, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Contract(format!(
                "field has {} values but grid has {} points",
                values.len(),
                spec.len()
            )));
        }
        Ok(Self { spec, values, side })
    }

    pub fn zeros(spec: GridSpec, side: Side) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); spec.len()];
        Self { spec, values, side }
    }

    /// Samples `f` at every physical grid point.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex<T> + Sync,
    {
        let values = sample(&spec, |s, flat, x| s.point(flat, x), f);
        Self { spec, values, side: Side::Physical }
    }

    /// Samples `f` at every frequency grid point (FFT order).
    pub fn from_frequency_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex<T> + Sync,
    {
        let values = sample(&spec, |s, flat, xi| s.frequency_point(flat, xi), f);
        Self { spec, values, side: Side::Frequency }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex<T>) -> Complex<T> + Sync,
    {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        Self { spec: self.spec.clone(), values, side: self.side }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise combination of two fields on the same grid and side.
    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex<T>, Complex<T>) -> Complex<T> + Sync,
    {
        self.check_compatible(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self { spec: self.spec.clone(), values, side: self.side })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Contract("fields live on different grids".into()));
        }
        if self.side != other.side {
            return Err(Error::Contract("fields live on different sides".into()));
        }
        Ok(())
    }

    /// L2 norm with the cell-volume weight of the current side.
    pub fn l2_norm(&self) -> T {
        let w = match self.side {
            Side::Physical => self.spec.cell_volume(),
            Side::Frequency => self.spec.frequency_cell_volume(),
        };
        let s = self.values.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        (s * lit::<T>(w)).sqrt()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    pub fn transform(&self, direction: Direction) -> Result<Self> {
        transform(self, direction)
    }
}

fn sample<T, P, F>(spec: &GridSpec, locate: P, f: F) -> Vec<Complex<T>>
where
    T: Real,
    P: Fn(&GridSpec, usize, &mut [f64]) + Sync,
    F: Fn(&[f64]) -> Complex<T> + Sync,
{
    let n = spec.dim_total();
    (0..spec.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, flat| {
                locate(spec, flat, buf);
                f(buf)
            },
        )
        .collect()
}

/// Fourier transform with integral normalization: the forward sum carries
/// the cell volume `dx^N`, the inverse sum `(1/2L)^N`.
pub fn transform<T: Real>(field: &Field<T>, direction: Direction) -> Result<Field<T>> {
    if field.side != direction.source() {
        return Err(Error::Contract(format!(
            "{direction:?} transform expects a {:?}-side field, got {:?}",
            direction.source(),
            field.side
        )));
    }
    let spec = &field.spec;
    let m = spec.samples_per_axis();
    let n = spec.dim_total();
    let mut values = field.values.clone();
    if direction == Direction::Inverse {
        apply_checkerboard(spec, &mut values);
    }

    let mut planner = FftPlanner::<T>::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(m),
        Direction::Inverse => planner.plan_fft_inverse(m),
    };
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let block = stride * m;
        values.par_chunks_mut(block).for_each_init(
            || vec![Complex::new(T::zero(), T::zero()); block],
            |scratch, chunk| {
                // gather the `stride` lines of this block contiguously
                for s in 0..stride {
                    for i in 0..m {
                        scratch[s * m + i] = chunk[i * stride + s];
                    }
                }
                fft.process(scratch);
                for s in 0..stride {
                    for i in 0..m {
                        chunk[i * stride + s] = scratch[s * m + i];
                    }
                }
            },
        );
    }

    let (scale, side) = match direction {
        Direction::Forward => {
            apply_checkerboard(spec, &mut values);
            (spec.cell_volume(), Side::Frequency)
        }
        Direction::Inverse => (spec.frequency_cell_volume(), Side::Physical),
    };
    let scale = lit::<T>(scale);
    values.par_iter_mut().for_each(|v| *v = *v * scale);
    Ok(Field { spec: spec.clone(), values, side })
}

/// Multiplies entry `k` by `(-1)^{k_1+...+k_N}`: the phase `e^{i pi k}`
/// produced by the grid starting at `-L`.
fn apply_checkerboard<T: Real>(spec: &GridSpec, values: &mut [Complex<T>]) {
    let m = spec.samples_per_axis();
    let n = spec.dim_total();
    values.par_iter_mut().enumerate().for_each(|(flat, v)| {
        let mut f = flat;
        let mut parity = 0;
        for _ in 0..n {
            parity += f % m;
            f /= m;
        }
        if parity % 2 == 1 {
            *v = -*v;
        }
    });
}

/// Exponent of one factor of a mixed norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    /// `f64::INFINITY` maps to the sup-norm sentinel.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("Lebesgue exponent must be at least 1, got {p}")));
        }
        if p.is_infinite() {
            Ok(LpExponent::Infinity)
        } else {
            Ok(LpExponent::Finite(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LpExponent::Finite(p) => p,
            LpExponent::Infinity => f64::INFINITY,
        }
    }
}

impl std::str::FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(LpExponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| invalid("p", format!("cannot parse exponent {t:?}")))?;
                LpExponent::new(p)
            }
        }
    }
}

/// Iterated mixed norm `|| ... || f ||_{L^{p_n}(dx_n)} ... ||_{L^{p_1}(dx_1)}`:
/// the innermost factor block is integrated first.
pub fn norm<T: Real>(field: &Field<T>, p_per_factor: &[LpExponent]) -> Result<T> {
    if field.side != Side::Physical {
        return Err(Error::Contract("norms are taken on the physical side".into()));
    }
    let spec = &field.spec;
    if p_per_factor.len() != spec.factors().len() {
        return Err(invalid(
            "p",
            format!(
                "{} exponents given for {} factor blocks",
                p_per_factor.len(),
                spec.factors().len()
            ),
        ));
    }
    for p in p_per_factor {
        if let LpExponent::Finite(v) = p {
            if v.is_nan() || *v < 1.0 {
                return Err(Error::Domain(format!("Lebesgue exponent must be at least 1, got {v}")));
            }
        }
    }
    let m = spec.samples_per_axis();
    let dx = spec.spacing();
    let mut current: Vec<T> = field.values.iter().map(|v| v.norm()).collect();
    for (&nf, &p) in spec.factors().iter().zip(p_per_factor).rev() {
        let block = m.pow(nf as u32);
        let weight = lit::<T>(dx.powi(nf as i32));
        current = current
            .par_chunks(block)
            .map(|chunk| match p {
                LpExponent::Infinity => chunk.iter().fold(T::zero(), |a, &b| a.max(b)),
                LpExponent::Finite(p) => finite_block_norm(chunk, p, weight),
            })
            .collect();
    }
    Ok(current[0])
}

/// Plain `L^p` norm (all factors share the exponent).
pub fn lp_norm<T: Real>(field: &Field<T>, p: LpExponent) -> Result<T> {
    let ps = vec![p; field.spec.factors().len()];
    norm(field, &ps)
}

fn finite_block_norm<T: Real>(chunk: &[T], p: f64, weight: T) -> T {
    // scale by the block maximum so large p does not overflow
    let top = chunk.iter().fold(T::zero(), |a, &b| a.max(b));
    if top == T::zero() {
        return T::zero();
    }
    let pt = lit::<T>(p);
    let s = if p == 1.0 {
        chunk.iter().fold(T::zero(), |a, &b| a + b / top)
    } else if p == 2.0 {
        chunk.iter().fold(T::zero(), |a, &b| {
            let r = b / top;
            a + r * r
        })
    } else {
        chunk.iter().fold(T::zero(), |a, &b| a + (b / top).powf(pt))
    };
    top * (s * weight).powf(T::one() / pt)
}
