//! Fourier symbols: the transform of the sphere-singular kernel `Omega^alpha`,
//! Bessel-potential weights `B_s`, the non-oscillating amplitudes `sigma_+-`
//! of the large-frequency expansion, symbol-class checks, and application of
//! a tabulated multiplier to a field.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{asymptotic_coeffs, bessel_auto, gamma::rgamma, BesselOrder};
use crate::decomp::{block_norms, bump};
use crate::error::{Error, Result};
use crate::grid::{Direction, Field, GridSpec, Side};
use crate::scalar::{lit, Real};

pub type C64 = Complex<f64>;

/// Sign of the phase `x.xi +- |xi|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    pub fn value(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            PhaseSign::Plus => PhaseSign::Minus,
            PhaseSign::Minus => PhaseSign::Plus,
        }
    }
}

impl std::str::FromStr for PhaseSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(PhaseSign::Plus),
            "minus" | "-" => Ok(PhaseSign::Minus),
            o => Err(Error::Validation { field: "phase_sign", reason: format!("expected plus or minus, got {o:?}") }),
        }
    }
}

/// Kernel order `alpha` and Sobolev output order `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub alpha: C64,
    pub r: f64,
}

impl OmegaParams {
    pub fn new(alpha: C64, r: f64) -> Self {
        Self { alpha, r }
    }

    pub fn real(alpha: f64, r: f64) -> Self {
        Self { alpha: Complex::new(alpha, 0.0), r }
    }

    /// `-(N-1)/2 <= Re alpha - r`, the parameter range of the estimates.
    pub fn in_estimate_range(&self, dim: usize) -> bool {
        self.alpha.re - self.r >= -((dim as f64 - 1.0) / 2.0)
    }

    /// Net decay order `(N-1)/2 + Re alpha - r` of the amplitude `sigma`.
    pub fn decay_order(&self, dim: usize) -> f64 {
        (dim as f64 - 1.0) / 2.0 + self.alpha.re - self.r
    }
}

/// Bessel order `N/2 + alpha - 1` attached to `Omega^alpha` in dimension `N`.
pub fn omega_order(alpha: C64, dim: usize) -> BesselOrder {
    BesselOrder::new(dim as f64 / 2.0 + alpha.re - 1.0, alpha.im)
}

/// `|xi|^{-nu} J_nu(2 pi |xi|)` with `nu = N/2 + alpha - 1`; the value at
/// `xi = 0` is the limit `pi^nu / Gamma(nu + 1)`.
pub fn omega_hat<T: Real>(alpha: C64, xi_norm: T, dim: usize) -> Result<Complex<T>> {
    if xi_norm < T::zero() {
        return Err(Error::Domain(format!("|xi| must be nonnegative, got {xi_norm}")));
    }
    let order = omega_order(alpha, dim);
    let nu = order.value::<T>();
    let z = lit::<T>(2.0) * T::PI() * xi_norm;
    if z <= lit::<T>(8.0) {
        return Ok(reduced_series(nu, T::PI() * xi_norm) * Complex::new(T::PI(), T::zero()).powc(nu));
    }
    let j = bessel_auto::<T>(order, z)?;
    Ok(j * (-nu * xi_norm.ln()).exp())
}

/// `sum_k (-1)^k w^{2k} / (k! Gamma(nu+k+1))`, i.e. `J_nu(2w) / w^nu`.
fn reduced_series<T: Real>(nu: Complex<T>, w: T) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let q = -(w * w);
    let mut power = T::one();
    let mut rg = rgamma(nu + one);
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 0..200usize {
        let term = rg * power;
        sum = sum + term;
        let kt = lit::<T>(k as f64);
        if kt > w && term.norm() <= lit::<T>(1e-17) * sum.norm() {
            break;
        }
        if w == T::zero() {
            break;
        }
        power = power * q / (kt + T::one());
        let next = nu + Complex::new(kt + lit::<T>(2.0), T::zero());
        rg = if rg.norm() == T::zero() { rgamma(next) } else { rg / (next - one) };
    }
    sum
}

/// Truncated series
/// `pi^{(N-1)/2 - z} sum_k (-1)^k (2 pi |xi|)^{2k}/(2k)! Gamma(k+1/2)/Gamma(k+N/2+1-z)`,
/// which equals `omega_hat` at `alpha = 1 - z`.
pub fn omega_hat_series<T: Real>(z: C64, xi_norm: T, dim: usize, terms: usize) -> Complex<T> {
    let zc = Complex::new(lit::<T>(z.re), lit::<T>(z.im));
    let half_dim = lit::<T>(dim as f64 / 2.0);
    let x2 = (lit::<T>(2.0) * T::PI() * xi_norm).powi(2);
    // (2 pi |xi|)^{2k} Gamma(k+1/2) / (2k)!, starting from Gamma(1/2)
    let mut coeff = T::PI().sqrt();
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 0..terms {
        let kt = lit::<T>(k as f64);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        let arg = Complex::new(kt + half_dim + T::one(), T::zero()) - zc;
        sum = sum + rgamma(arg) * (coeff * sign);
        let two_k = lit::<T>(2.0) * kt;
        coeff = coeff * x2 * (kt + lit::<T>(0.5)) / ((two_k + T::one()) * (two_k + lit::<T>(2.0)));
    }
    let pre_exp = Complex::new((lit::<T>(dim as f64) - T::one()) / lit::<T>(2.0), T::zero()) - zc;
    Complex::new(T::PI(), T::zero()).powc(pre_exp) * sum
}

/// `pi^{alpha-1} Gamma(alpha)^{-1} (1 - |x|^2)_+^{alpha-1}` for `Re alpha > 0`.
pub fn omega_kernel<T: Real>(alpha: C64, x: &[f64]) -> Result<Complex<T>> {
    if alpha.re <= 0.0 {
        return Err(Error::Regime(format!(
            "physical-side Omega^alpha is only defined for Re alpha > 0, got {alpha}"
        )));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let one = Complex::new(1.0, 0.0);
    let pre = Complex::new(std::f64::consts::PI, 0.0).powc(alpha - one) * rgamma(alpha);
    let v = if alpha == one { pre } else { pre * Complex::new(1.0 - r2, 0.0).powc(alpha - one) };
    Ok(Complex::new(lit(v.re), lit(v.im)))
}

/// Samples `Omega^alpha` on the grid, replacing the value in every cell
/// crossed by the unit sphere with its average over `16^N` sub-cells.
pub fn sample_omega_kernel<T: Real>(alpha: C64, spec: &GridSpec) -> Result<Field<T>> {
    omega_kernel::<f64>(alpha, &vec![0.0; spec.dim_total()])?;
    const SUB: usize = 16;
    let dx = spec.spacing();
    let n = spec.dim_total();
    let field = Field::from_fn(spec.clone(), |x| {
        let mut near = 0.0;
        let mut far = 0.0;
        for &v in x {
            let a = v.abs();
            near += (a - dx / 2.0).max(0.0).powi(2);
            far += (a + dx / 2.0).powi(2);
        }
        if near >= 1.0 || far <= 1.0 {
            let v: Complex<T> = omega_kernel(alpha, x).unwrap_or_default();
            return v;
        }
        let total = SUB.pow(n as u32);
        let mut acc = Complex::new(0.0, 0.0);
        let mut y = vec![0.0; n];
        for s in 0..total {
            let mut rest = s;
            for (a, ya) in y.iter_mut().enumerate() {
                let i = rest % SUB;
                rest /= SUB;
                *ya = x[a] + dx * ((i as f64 + 0.5) / SUB as f64 - 0.5);
            }
            acc += omega_kernel::<f64>(alpha, &y).unwrap_or_default();
        }
        acc /= total as f64;
        Complex::new(lit(acc.re), lit(acc.im))
    });
    Ok(field)
}

/// `prod_i (1 + |xi_i|^2)^{s_i/2}`.
pub fn b_s_hat<T: Real>(s: &[f64], block_norms: &[f64]) -> Result<T> {
    if s.len() != block_norms.len() {
        return Err(Error::Contract(format!("{} exponents for {} blocks", s.len(), block_norms.len())));
    }
    let v: f64 = s.iter().zip(block_norms).map(|(&si, &x)| (1.0 + x * x).powf(si / 2.0)).product();
    Ok(lit(v))
}

/// Amplitudes `sigma_+-` of the large-frequency expansion
/// `omega_hat(xi) ~ (1/2pi) [e^{2 pi i|xi|} e^{-i theta} sigma_+ + e^{-2 pi i|xi|} e^{i theta} sigma_-]`
/// with `theta = nu pi/2 + pi/4`, times the Sobolev weights and the cutoff
/// `1 - phi(|xi|)`:
///
/// `sigma_+- = (1+|xi|^2)^{r/2} |xi|^{-((N-1)/2+alpha)} (A -+ i B) [1-phi(|xi|)] prod (1+|xi_i|^2)^{-s_i/2}`,
/// `A = 1 + sum a_k (2 pi |xi|)^{-2k}`, `B = sum b_k (2 pi |xi|)^{1-2k}`.
#[derive(Clone, Debug)]
pub struct SigmaSymbol {
    params: OmegaParams,
    s: Vec<f64>,
    factors: Vec<usize>,
    dim: usize,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl SigmaSymbol {
    pub fn new(params: OmegaParams, s: &[f64], factors: &[usize], correction_terms: usize) -> Result<Self> {
        if s.len() != factors.len() {
            return Err(Error::Contract(format!("{} Sobolev exponents for {} blocks", s.len(), factors.len())));
        }
        let dim: usize = factors.iter().sum();
        let order = omega_order(params.alpha, dim);
        let mut a = Vec::with_capacity(correction_terms);
        let mut b = Vec::with_capacity(correction_terms);
        for k in 1..=correction_terms {
            let c = asymptotic_coeffs::<f64>(order, k)?;
            a.push(c.a_k);
            b.push(c.b_k);
        }
        Ok(Self { params, s: s.to_vec(), factors: factors.to_vec(), dim, a, b })
    }

    pub fn params(&self) -> OmegaParams {
        self.params
    }

    /// Symbol class the amplitude belongs to: the decay
    /// `|xi|^{-m0}`, `m0 = (N-1)/2 + Re alpha - r`, is shared among the
    /// blocks in proportion `N_i/N`, on top of each `s_i`.
    pub fn class(&self) -> SymbolClass {
        let m0 = self.params.decay_order(self.dim);
        SymbolClass::new(
            self.s
                .iter()
                .zip(&self.factors)
                .map(|(&si, &ni)| si + m0 * ni as f64 / self.dim as f64)
                .collect(),
        )
    }

    pub fn eval(&self, xi: &[f64], branch: PhaseSign) -> C64 {
        let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xn <= 1.0 {
            return Complex::new(0.0, 0.0);
        }
        let mut norms = vec![0.0; self.factors.len()];
        block_norms(&self.factors, xi, &mut norms);
        self.eval_norms(xn, &norms, branch)
    }

    pub fn eval_norms(&self, xi_norm: f64, norms: &[f64], branch: PhaseSign) -> C64 {
        if xi_norm <= 1.0 {
            return Complex::new(0.0, 0.0);
        }
        let cutoff = 1.0 - bump(xi_norm);
        let w = 2.0 * std::f64::consts::PI * xi_norm;
        let mut big_a = Complex::new(1.0, 0.0);
        let mut big_b = Complex::new(0.0, 0.0);
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let k = k as i32 + 1;
            big_a += ak * w.powi(-2 * k);
            big_b += bk * w.powi(1 - 2 * k);
        }
        let i = Complex::new(0.0, 1.0);
        let amp = match branch {
            PhaseSign::Plus => big_a - i * big_b,
            PhaseSign::Minus => big_a + i * big_b,
        };
        let exponent = Complex::new(-((self.dim as f64 - 1.0) / 2.0), 0.0) - self.params.alpha;
        let lead = (1.0 + xi_norm * xi_norm).powf(self.params.r / 2.0) * Complex::new(xi_norm, 0.0).powc(exponent);
        let weights: f64 = self.s.iter().zip(norms).map(|(&si, &x)| (1.0 + x * x).powf(-si / 2.0)).product();
        lead * amp * (cutoff * weights)
    }

    /// Recombines both amplitudes with their phases; approximates
    /// `omega_hat (1+|xi|^2)^{r/2} [1-phi] prod (1+|xi_i|^2)^{-s_i/2}`.
    pub fn reconstruct(&self, xi: &[f64]) -> C64 {
        let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let order = omega_order(self.params.alpha, self.dim).value::<f64>();
        let theta = order * std::f64::consts::FRAC_PI_2 + std::f64::consts::FRAC_PI_4;
        let i = Complex::new(0.0, 1.0);
        let w = 2.0 * std::f64::consts::PI * xn;
        let plus = (i * w).exp() * (-i * theta).exp() * self.eval(xi, PhaseSign::Plus);
        let minus = (-i * w).exp() * (i * theta).exp() * self.eval(xi, PhaseSign::Minus);
        (plus + minus) / (2.0 * std::f64::consts::PI)
    }
}

/// One-shot evaluation of `sigma_+-` at a frequency given per block.
pub fn sigma_symbol(
    params: OmegaParams,
    s: &[f64],
    correction_terms: usize,
    xi_blocks: &[&[f64]],
    branch: PhaseSign,
) -> Result<C64> {
    let factors: Vec<usize> = xi_blocks.iter().map(|b| b.len()).collect();
    let sym = SigmaSymbol::new(params, s, &factors, correction_terms)?;
    let xi: Vec<f64> = xi_blocks.iter().flat_map(|b| b.iter().copied()).collect();
    Ok(sym.eval(&xi, branch))
}

/// Product-type decay class `S^{-m}_rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolClass {
    pub rho: Vec<f64>,
}

impl SymbolClass {
    pub fn new(rho: Vec<f64>) -> Self {
        Self { rho }
    }

    pub fn m(&self) -> f64 {
        self.rho.iter().sum()
    }

    /// Violations of `(N_i-1)/(N-1) m < rho_i < N_i/2`, required when
    /// `0 < m <= (N-1)/2`.
    pub fn admissibility_violations(&self, factors: &[usize]) -> Vec<String> {
        admissibility_violations("rho", &self.rho, factors, false)
    }
}

/// Shared check for `rho` (symbol classes) and `s` (Sobolev orders). With
/// `upper_always` the bound `v_i < N_i/2` is enforced for every `|v|`.
pub(crate) fn admissibility_violations(name: &str, v: &[f64], factors: &[usize], upper_always: bool) -> Vec<String> {
    let mut out = Vec::new();
    if v.len() != factors.len() {
        out.push(format!("{name} has {} entries for {} factor blocks", v.len(), factors.len()));
        return out;
    }
    if v.iter().any(|&x| x < 0.0) {
        out.push(format!("{name} entries must be nonnegative"));
    }
    let n: usize = factors.iter().sum();
    let total: f64 = v.iter().sum();
    let scoped = n >= 2 && total > 0.0 && total <= (n as f64 - 1.0) / 2.0;
    for (i, (&x, &ni)) in v.iter().zip(factors).enumerate() {
        let lower = (ni as f64 - 1.0) / (n as f64 - 1.0).max(1.0) * total;
        let upper = ni as f64 / 2.0;
        if scoped && !(x > lower) {
            out.push(format!("{name}_{}: {x} <= (N_{0}-1)/(N-1)|{name}| = {lower}", i + 1));
        }
        if (scoped || upper_always) && !(x < upper) {
            out.push(format!("{name}_{}: {x} >= N_{0}/2 = {upper}", i + 1));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    OmegaHat,
    BS,
    Sigma,
    Custom,
}

/// A symbol sampled on the frequency grid (FFT order).
#[derive(Clone, Debug)]
pub struct MultiplierTable<T> {
    spec: GridSpec,
    values: Vec<Complex<T>>,
    provenance: Provenance,
}

impl<T: Real> MultiplierTable<T> {
    pub fn new(spec: GridSpec, provenance: Provenance, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Contract(format!(
                "table has {} values for {} grid points",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Contract("multiplier table has non-finite entries".into()));
        }
        Ok(Self { spec, values, provenance })
    }

    /// Evaluates `f` at every frequency point.
    pub fn from_fn<F>(spec: GridSpec, provenance: Provenance, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        let field = Field::<T>::from_frequency_fn(spec.clone(), |xi| {
            let v = f(xi);
            Complex::new(lit(v.re), lit(v.im))
        });
        Self::new(spec, provenance, field.into_values())
    }

    pub fn omega_hat(alpha: C64, spec: &GridSpec) -> Result<Self> {
        let n = spec.dim_total();
        let failed = std::sync::atomic::AtomicBool::new(false);
        let t = Self::from_fn(spec.clone(), Provenance::OmegaHat, |xi| {
            let xn = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            omega_hat::<f64>(alpha, xn, n).unwrap_or_else(|_| {
                failed.store(true, std::sync::atomic::Ordering::Relaxed);
                Complex::new(0.0, 0.0)
            })
        })?;
        if failed.into_inner() {
            return Err(Error::Range("omega_hat evaluation failed on the grid".into()));
        }
        Ok(t)
    }

    pub fn b_s(s: &[f64], spec: &GridSpec) -> Result<Self> {
        if s.len() != spec.factors().len() {
            return Err(Error::Contract(format!("{} exponents for {} blocks", s.len(), spec.factors().len())));
        }
        let factors = spec.factors().to_vec();
        Self::from_fn(spec.clone(), Provenance::BS, |xi| {
            let mut norms = vec![0.0; factors.len()];
            block_norms(&factors, xi, &mut norms);
            Complex::new(s.iter().zip(&norms).map(|(&si, &x)| (1.0 + x * x).powf(si / 2.0)).product(), 0.0)
        })
    }

    /// `sigma_branch`, optionally times its phase `e^{+-2 pi i |xi|}`.
    pub fn sigma(sym: &SigmaSymbol, branch: PhaseSign, with_phase: bool, spec: &GridSpec) -> Result<Self> {
        if sym.factors != spec.factors() {
            return Err(Error::Contract("symbol and grid use different factor splits".into()));
        }
        Self::from_fn(spec.clone(), Provenance::Sigma, |xi| {
            let v = sym.eval(xi, branch);
            if with_phase {
                let xn = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                v * Complex::new(0.0, branch.value() * 2.0 * std::f64::consts::PI * xn).exp()
            } else {
                v
            }
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn sup(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.norm()))
    }

    pub fn reciprocal(&self) -> Result<Self> {
        if self.values.iter().any(|v| v.norm() == T::zero()) {
            return Err(Error::Domain("cannot invert a multiplier with zeros".into()));
        }
        let one = Complex::new(T::one(), T::zero());
        let values = self.values.iter().map(|&v| one / v).collect();
        Self::new(self.spec.clone(), Provenance::Custom, values)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::Contract("tables live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Self::new(self.spec.clone(), Provenance::Custom, values)
    }

    /// Multiplies by `e^{+-2 pi i |xi|}`.
    pub fn with_phase(&self, sign: PhaseSign) -> Result<Self> {
        let phase = MultiplierTable::<T>::from_fn(self.spec.clone(), Provenance::Custom, |xi| {
            let xn = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            Complex::new(0.0, sign.value() * 2.0 * std::f64::consts::PI * xn).exp()
        })?;
        let mut t = self.product(&phase)?;
        t.provenance = self.provenance;
        Ok(t)
    }

    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Complex<T>,
    {
        Self::new(self.spec.clone(), self.provenance, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// `inverse(table * forward(f))`.
pub fn apply_multiplier<T: Real>(f: &Field<T>, table: &MultiplierTable<T>) -> Result<Field<T>> {
    if f.side() != Side::Physical {
        return Err(Error::Contract("multipliers act on physical-side fields".into()));
    }
    if f.spec() != table.spec() {
        return Err(Error::Contract("field and multiplier table use different grids".into()));
    }
    let mut spectrum = f.transform(Direction::Forward)?;
    spectrum
        .values_mut()
        .par_iter_mut()
        .zip(table.values().par_iter())
        .for_each(|(v, &m)| *v = *v * m);
    spectrum.transform(Direction::Inverse)
}

/// Worst weighted derivative `sup |d^beta sigma| prod (1+|xi_i|)^{|beta_i| + rho_i}`
/// for one multi-index.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub multi_index: Vec<usize>,
    pub ratio: f64,
    /// Ratio on the refined grid divided by the ratio on the base grid.
    pub drift: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub passed: bool,
    pub rows: Vec<ClassRow>,
}

fn multi_indices(dim: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; dim]];
    let mut frontier = vec![vec![0; dim]];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for b in &frontier {
            let start = b.iter().rposition(|&v| v > 0).unwrap_or(0);
            for a in start..dim {
                let mut c = b.clone();
                c[a] += 1;
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Ratios of every multi-index up to `max_order` (at most 2) by central
/// differences on the frequency grid. Points within `max_order` cells of
/// the grid edge are skipped so no stencil wraps around.
pub fn symbol_class_check<T: Real>(
    table: &MultiplierTable<T>,
    cls: &SymbolClass,
    max_order: usize,
) -> Result<ClassReport> {
    let rows = class_ratios(table, cls, max_order)?;
    let passed = rows.iter().all(|r| r.ratio.is_finite());
    Ok(ClassReport { passed, rows })
}

fn class_ratios<T: Real>(table: &MultiplierTable<T>, cls: &SymbolClass, max_order: usize) -> Result<Vec<ClassRow>> {
    if max_order > 2 {
        return Err(Error::Domain("class check supports derivatives up to order 2".into()));
    }
    let spec = table.spec();
    let factors = spec.factors().to_vec();
    if cls.rho.len() != factors.len() {
        return Err(Error::Contract(format!("class has {} exponents for {} blocks", cls.rho.len(), factors.len())));
    }
    let n = spec.dim_total();
    let m = spec.samples_per_axis();
    let h = spec.frequency_spacing();
    let base: Vec<C64> = table
        .values()
        .iter()
        .map(|v| Complex::new(v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN)))
        .collect();
    let half = (m / 2) as isize;
    let margin = max_order as isize;
    let block_of_axis: Vec<usize> =
        factors.iter().enumerate().flat_map(|(b, &f)| std::iter::repeat(b).take(f)).collect();

    let mut rows = Vec::new();
    for beta in multi_indices(n, max_order) {
        let mut d = base.clone();
        for (axis, &order) in beta.iter().enumerate() {
            if order > 0 {
                d = difference(&d, spec, axis, order, h);
            }
        }
        let mut per_block = vec![0usize; factors.len()];
        for (axis, &o) in beta.iter().enumerate() {
            per_block[block_of_axis[axis]] += o;
        }
        let worst = (0..d.len())
            .into_par_iter()
            .map(|flat| {
                let mut idx = vec![0usize; n];
                spec.unravel(flat, &mut idx);
                let mut xi = vec![0.0; n];
                for a in 0..n {
                    let k = spec.signed_index(idx[a]);
                    if k < -half + margin || k > half - 1 - margin {
                        return 0.0;
                    }
                    xi[a] = k as f64 * h;
                }
                let mut norms = vec![0.0; factors.len()];
                block_norms(&factors, &xi, &mut norms);
                let w: f64 = norms
                    .iter()
                    .zip(&per_block)
                    .zip(&cls.rho)
                    .map(|((&x, &o), &r)| (1.0 + x).powf(o as f64 + r))
                    .product();
                let v = d[flat].norm() * w;
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            })
            .reduce(|| 0.0, f64::max);
        rows.push(ClassRow { multi_index: beta, ratio: worst, drift: None });
    }
    Ok(rows)
}

fn difference(v: &[C64], spec: &GridSpec, axis: usize, order: usize, h: f64) -> Vec<C64> {
    let m = spec.samples_per_axis();
    let n = spec.dim_total();
    let stride = m.pow((n - 1 - axis) as u32);
    (0..v.len())
        .into_par_iter()
        .map(|flat| {
            let i = (flat / stride) % m;
            let up = flat - i * stride + ((i + 1) % m) * stride;
            let down = flat - i * stride + ((i + m - 1) % m) * stride;
            match order {
                1 => (v[up] - v[down]) / (2.0 * h),
                _ => (v[up] - v[flat] * 2.0 + v[down]) / (h * h),
            }
        })
        .collect()
}

/// Runs the check on `spec` and on the refinement with `2M` samples and
/// half width `L/2` (four times the frequency reach), and passes when every
/// ratio is finite and grows by less than 2x under the refinement.
pub fn check_symbol<F>(symbol: F, spec: &GridSpec, cls: &SymbolClass, max_order: usize) -> Result<ClassReport>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let coarse = MultiplierTable::<f64>::from_fn(spec.clone(), Provenance::Custom, &symbol)?;
    let fine_spec = GridSpec::new(
        spec.dim_total(),
        spec.factors(),
        2 * spec.samples_per_axis(),
        spec.half_width() / 2.0,
    )?;
    let fine = MultiplierTable::<f64>::from_fn(fine_spec, Provenance::Custom, &symbol)?;
    symbol_class_check_refined(&coarse, &fine, cls, max_order)
}

/// Drift comparison between a base table and its refinement.
pub fn symbol_class_check_refined<T: Real>(
    coarse: &MultiplierTable<T>,
    fine: &MultiplierTable<T>,
    cls: &SymbolClass,
    max_order: usize,
) -> Result<ClassReport> {
    let a = class_ratios(coarse, cls, max_order)?;
    let b = class_ratios(fine, cls, max_order)?;
    let scale = a.iter().chain(&b).map(|r| r.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max);
    let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let rows: Vec<ClassRow> = a
        .into_iter()
        .zip(b)
        .map(|(ra, rb)| ClassRow {
            drift: Some((rb.ratio + tiny) / (ra.ratio + tiny)),
            multi_index: ra.multi_index,
            ratio: rb.ratio,
        })
        .collect();
    let passed = rows.iter().all(|r| r.ratio.is_finite() && r.drift.map_or(false, |d| d < 2.0));
    Ok(ClassReport { passed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_hat_at_origin() {
        let v = omega_hat::<f64>(Complex::new(1.0, 0.0), 0.0, 2).unwrap();
        assert!((v.re - PI).abs() < 1e-14 && v.im == 0.0);
        let v = omega_hat::<f64>(Complex::new(1.0, 0.0), 1e-9, 2).unwrap();
        assert!((v.re - PI).abs() < 1e-12);
    }

    #[test]
    fn omega_hat_half_order() {
        // N = 3, alpha = 0: sin(2 pi |xi|) / (pi |xi|)
        for &x in &[0.5, 0.8, 1.7, 3.3] {
            let v = omega_hat::<f64>(Complex::new(0.0, 0.0), x, 3).unwrap();
            let exact = (2.0 * PI * x).sin() / (PI * x);
            assert!((v.re - exact).abs() < 1e-13, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn series_term_zero() {
        let z = Complex::new(0.3, -0.2);
        let v = omega_hat_series::<f64>(z, 0.0, 3, 5);
        let exact = Complex::new(PI, 0.0).powc(Complex::new(1.5, 0.0) - z)
            * rgamma(Complex::new(2.5, 0.0) - z);
        assert!((v - exact).norm() < 1e-14);
    }

    #[test]
    fn kernel_examples() {
        let one = Complex::new(1.0, 0.0);
        assert!((omega_kernel::<f64>(one, &[0.3, 0.2]).unwrap() - one).norm() < 1e-14);
        let v = omega_kernel::<f64>(Complex::new(0.5, 0.0), &[0.0, 0.0]).unwrap();
        assert!((v.re - 1.0 / PI).abs() < 1e-15);
        assert_eq!(omega_kernel::<f64>(Complex::new(0.7, 0.1), &[1.5, 0.0]).unwrap().norm(), 0.0);
        assert!(matches!(omega_kernel::<f64>(Complex::new(0.0, 1.0), &[0.0]), Err(Error::Regime(_))));
    }

    #[test]
    fn b_s_examples() {
        assert_eq!(b_s_hat::<f64>(&[0.3, 0.4], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((b_s_hat::<f64>(&[1.0], &[1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b_s_hat::<f64>(&[0.0, 0.0], &[3.0, 7.0]).unwrap(), 1.0);
    }

    #[test]
    fn sigma_vanishes_inside_unit_ball() {
        let p = OmegaParams::real(0.5, 0.0);
        let v = sigma_symbol(p, &[0.1, 0.1], 2, &[&[0.5], &[0.6]], PhaseSign::Plus).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 2).len(), 10);
        assert_eq!(multi_indices(3, 1).len(), 4);
    }

    #[test]
    fn admissibility() {
        assert!(admissibility_violations("s", &[0.25, 0.25], &[1, 1], false).is_empty());
        assert_eq!(admissibility_violations("s", &[0.2, 0.6], &[2, 1], false).len(), 2);
        assert!(admissibility_violations("s", &[0.0, 0.0], &[1, 1], false).is_empty());
    }
}
