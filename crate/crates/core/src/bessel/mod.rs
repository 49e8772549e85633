//! Bessel functions of the first kind `J_{a+ib}(rho)` for complex order and
//! real argument: ascending series, the Hankel-type large-argument
//! expansion, and Miller's backward recurrence.

pub mod gamma;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

pub use gamma::{gamma, rgamma};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    pub a: f64,
    pub b: f64,
}

impl BesselOrder {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64) -> Self {
        Self { a, b: 0.0 }
    }

    pub fn value<T: Real>(self) -> Complex<T> {
        Complex::new(lit(self.a), lit(self.b))
    }

    pub fn shifted(self, da: f64) -> Self {
        Self { a: self.a + da, b: self.b }
    }

    /// Negative integer order `-n`, if this is one.
    fn negative_integer(self) -> Option<u32> {
        (self.b == 0.0 && self.a < 0.0 && self.a == self.a.round()).then(|| (-self.a) as u32)
    }

    /// Start of the large-argument regime, `max(12, 2(|a|+|b|)^2)`.
    pub fn switchover(self) -> f64 {
        let s = self.a.abs() + self.b.abs();
        (2.0 * s * s).max(12.0)
    }

    /// `sqrt(2/(pi rho)) cosh(pi b/2)`: the large-argument size of `J`,
    /// used as the scale for relative errors of an oscillating function.
    pub fn envelope(self, rho: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * rho)).sqrt() * (std::f64::consts::FRAC_PI_2 * self.b).cosh()
    }
}

impl std::fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+}i", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Asymptotic,
    Recurrence,
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Method::Series),
            "asymptotic" => Ok(Method::Asymptotic),
            "recurrence" => Ok(Method::Recurrence),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Validation {
                field: "method",
                reason: format!("unknown method {other:?} (series|asymptotic|recurrence|auto)"),
            }),
        }
    }
}

/// Coefficients of the `k`-th correction of the large-argument expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticCoeffs<T> {
    pub k: usize,
    /// Multiplies `rho^{-2k}` in the cosine part.
    pub a_k: Complex<T>,
    /// Multiplies `rho^{1-2k}` in the sine part.
    pub b_k: Complex<T>,
    /// `[nu, 2k]`
    pub bracket_even: Complex<T>,
    /// `[nu, 2k-1]`
    pub bracket_odd: Complex<T>,
}

/// `[nu, m] = Gamma(1/2+nu+m) / (m! Gamma(1/2+nu-m))`.
///
/// The denominator goes through `1/Gamma`, so half-integer orders give exact
/// zeros. When the numerator itself sits on a pole the ratio is still a
/// polynomial in `nu`, which is then evaluated directly.
pub fn bracket<T: Real>(nu: Complex<T>, m: usize) -> Complex<T> {
    if m == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let mt = Complex::new(from_usize::<T>(m), T::zero());
    let num_arg = half + nu + mt;
    if gamma::is_pole(num_arg) {
        return bracket_polynomial(nu, m);
    }
    let mut fact = T::one();
    for i in 2..=m {
        fact = fact * from_usize::<T>(i);
    }
    gamma(num_arg) * rgamma(half + nu - mt) / fact
}

/// `prod_{j=1..m} (4 nu^2 - (2j-1)^2) / (4^m m!)`.
fn bracket_polynomial<T: Real>(nu: Complex<T>, m: usize) -> Complex<T> {
    let four_nu2 = nu * nu * lit::<T>(4.0);
    let mut acc = Complex::new(T::one(), T::zero());
    for j in 1..=m {
        let odd = from_usize::<T>(2 * j - 1);
        acc = acc * (four_nu2 - odd * odd) / (lit::<T>(4.0) * from_usize::<T>(j));
    }
    acc
}

/// `a_k = (-1)^k [nu,2k] 2^{-2k}` and `b_k = (-1)^k [nu,2k-1] 2^{1-2k}`.
///
/// The sign of `b_k` is the one that reproduces `J`: for order 0 it gives
/// `b_1 = +1/8`, the classical `-Q` coefficient of the Hankel expansion.
pub fn asymptotic_coeffs<T: Real>(order: BesselOrder, k: usize) -> Result<AsymptoticCoeffs<T>> {
    if k == 0 {
        return Err(Error::Domain("asymptotic coefficient index starts at k = 1".into()));
    }
    let nu = order.value::<T>();
    let even = bracket(nu, 2 * k);
    let odd = bracket(nu, 2 * k - 1);
    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
    let two = lit::<T>(2.0);
    Ok(AsymptoticCoeffs {
        k,
        a_k: even * sign * two.powi(-2 * k as i32),
        b_k: odd * sign * two.powi(1 - 2 * k as i32),
        bracket_even: even,
        bracket_odd: odd,
    })
}

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if rho.is_nan() || rho < T::zero() {
        return Err(Error::Domain(format!("Bessel argument must be nonnegative, got {rho}")));
    }
    if rho.is_infinite() {
        return Err(Error::Range("Bessel argument is infinite".into()));
    }
    Ok(())
}

/// `J_nu(0)`: 1 for order 0, 0 for `Re nu > 0`; undefined otherwise.
fn value_at_zero<T: Real>(order: BesselOrder) -> Result<Complex<T>> {
    if order.a == 0.0 && order.b == 0.0 {
        Ok(Complex::new(T::one(), T::zero()))
    } else if order.a > 0.0 || order.negative_integer().is_some() {
        Ok(Complex::new(T::zero(), T::zero()))
    } else {
        Err(Error::Domain(format!("J of order {order} is singular at rho = 0")))
    }
}

/// Outcome of a series summation, with the largest term seen so the caller
/// can judge cancellation.
struct SeriesSum<T> {
    value: Complex<T>,
    largest_term: T,
    converged: bool,
}

fn series_sum<T: Real>(order: BesselOrder, rho: T, terms: usize) -> Result<SeriesSum<T>> {
    let nu = order.value::<T>();
    let half = rho / lit::<T>(2.0);
    let lead = Complex::new(half, T::zero()).powc(nu);
    let q = -(half * half);
    let one = Complex::new(T::one(), T::zero());
    let tol = lit::<T>(1e-16);

    let mut power = T::one(); // (-rho^2/4)^k / k!
    let mut rg = rgamma(nu + one); // 1/Gamma(nu+k+1)
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut largest = T::zero();
    let mut converged = false;
    for k in 0..terms {
        let term = lead * rg * power;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::Range(format!(
                "series for J at rho = {rho} overflows; use the asymptotic or recurrence path"
            )));
        }
        sum = sum + term;
        largest = largest.max(term.norm());
        let kt = from_usize::<T>(k);
        // terms stop growing once k exceeds rho/2
        if kt > half && term.norm() <= tol * sum.norm() {
            converged = true;
            break;
        }
        if rho == T::zero() {
            converged = true;
            break;
        }
        power = power * q / (kt + T::one());
        let shift = nu + Complex::new(kt + lit::<T>(2.0), T::zero());
        rg = if rg == Complex::new(T::zero(), T::zero()) {
            rgamma(shift)
        } else {
            rg / (shift - one)
        };
    }
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Range(format!("series for J at rho = {rho} is not finite")));
    }
    Ok(SeriesSum { value: sum, largest_term: largest, converged })
}

/// Partial sum of `sum_k (-1)^k (rho/2)^{nu+2k} / (k! Gamma(nu+k+1))`, stopping
/// early once the last term drops below `1e-16 |sum|`.
pub fn bessel_series<T: Real>(order: BesselOrder, rho: T, terms: usize) -> Result<Complex<T>> {
    check_rho(rho)?;
    if terms == 0 {
        return Err(Error::Domain("series needs at least one term".into()));
    }
    if rho == T::zero() {
        return value_at_zero(order);
    }
    if let Some(n) = order.negative_integer() {
        let v = bessel_series(BesselOrder::real(n as f64), rho, terms)?;
        return Ok(if n % 2 == 1 { -v } else { v });
    }
    Ok(series_sum(order, rho, terms)?.value)
}

/// Large-argument expansion truncated after `terms` corrections, with no
/// regime check. Valid for any `rho > 0`; accurate only for large `rho`.
pub fn asymptotic_expansion<T: Real>(order: BesselOrder, rho: T, terms: usize) -> Result<Complex<T>> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("asymptotic expansion needs rho > 0, got {rho}")));
    }
    let (mut cos_part, mut sin_part) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    for k in 1..=terms {
        let c = asymptotic_coeffs::<T>(order, k)?;
        cos_part = cos_part + c.a_k * rho.powi(-2 * k as i32);
        sin_part = sin_part + c.b_k * rho.powi(1 - 2 * k as i32);
    }
    Ok(combine_asymptotic(order, rho, cos_part, sin_part))
}

fn combine_asymptotic<T: Real>(
    order: BesselOrder,
    rho: T,
    cos_part: Complex<T>,
    sin_part: Complex<T>,
) -> Complex<T> {
    let nu = order.value::<T>();
    let phase = Complex::new(rho - T::FRAC_PI_4(), T::zero()) - nu * T::FRAC_PI_2();
    let amp = (lit::<T>(2.0) / (T::PI() * rho)).sqrt();
    (phase.cos() * cos_part + phase.sin() * sin_part) * amp
}

/// Large-argument expansion with `terms` corrections; refuses arguments
/// below the switchover `max(12, 2(|a|+|b|)^2)`.
pub fn bessel_asymptotic<T: Real>(order: BesselOrder, rho: T, terms: usize) -> Result<Complex<T>> {
    check_rho(rho)?;
    let rs = order.switchover();
    if rho < lit::<T>(rs) {
        return Err(Error::Regime(format!(
            "asymptotic expansion of order {order} needs rho >= {rs}, got {rho}"
        )));
    }
    asymptotic_expansion(order, rho, terms)
}

/// Sums the expansion until the corrections fall below `tol` (relative to
/// the leading term) and reports whether that happened before the terms
/// started to grow.
fn asymptotic_adaptive<T: Real>(order: BesselOrder, rho: T, tol: f64) -> (Complex<T>, bool) {
    let tol = lit::<T>(tol);
    let mut cos_part = Complex::new(T::one(), T::zero());
    let mut sin_part = Complex::new(T::zero(), T::zero());
    let mut previous = T::infinity();
    let mut converged = false;
    for k in 1..200 {
        let c = match asymptotic_coeffs::<T>(order, k) {
            Ok(c) => c,
            Err(_) => break,
        };
        let da = c.a_k * rho.powi(-2 * k as i32);
        let db = c.b_k * rho.powi(1 - 2 * k as i32);
        let size = da.norm().max(db.norm());
        if size > previous {
            break;
        }
        cos_part = cos_part + da;
        sin_part = sin_part + db;
        if size <= tol {
            converged = true;
            break;
        }
        previous = size;
    }
    (combine_asymptotic(order, rho, cos_part, sin_part), converged)
}

/// Miller's algorithm: backward three-term recurrence from a high order,
/// normalized with `sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(rho) = (rho/2)^mu`.
pub fn bessel_recurrence<T: Real>(order: BesselOrder, rho: T) -> Result<Complex<T>> {
    check_rho(rho)?;
    if rho == T::zero() {
        return value_at_zero(order);
    }
    if let Some(n) = order.negative_integer() {
        let v = bessel_recurrence(BesselOrder::real(n as f64), rho)?;
        return Ok(if n % 2 == 1 { -v } else { v });
    }
    let nu = order.value::<T>();
    // Normalize from a base order with positive real part; the recurrence
    // then runs down to nu itself.
    let shift = if order.a > 0.0 { 0 } else { (-order.a).ceil() as usize + 1 };
    let rho_f = rho.to_f64().unwrap_or(f64::MAX);
    let extra = 40.0 + 10.0 * rho_f.cbrt() + order.b.abs();
    let mut top = (rho_f.max(order.a.abs()) + extra).ceil() as usize + shift;
    if (top - shift) % 2 == 1 {
        top += 1;
    }

    let zero = Complex::new(T::zero(), T::zero());
    let mut y = vec![zero; top + 2];
    y[top] = Complex::new(lit::<T>(1e-30), T::zero());
    let big = lit::<T>(1e200);
    let two_over_rho = lit::<T>(2.0) / rho;
    for k in (1..=top).rev() {
        let ord = nu + Complex::new(from_usize::<T>(k), T::zero());
        y[k - 1] = ord * two_over_rho * y[k] - y[k + 1];
        if y[k - 1].norm() > big {
            let s = T::one() / big;
            for v in y[k - 1..].iter_mut() {
                *v = *v * s;
            }
        }
    }

    let mu = nu + Complex::new(from_usize::<T>(shift), T::zero());
    let mut sum = y[shift];
    let mut e = Complex::new(T::one(), T::zero());
    let mut k = 1;
    while shift + 2 * k <= top {
        let kt = from_usize::<T>(k);
        sum = sum + (mu + kt * lit::<T>(2.0)) * e * y[shift + 2 * k];
        e = e * (mu + kt) / (kt + T::one());
        k += 1;
    }
    let one = Complex::new(T::one(), T::zero());
    let target = Complex::new(rho / lit::<T>(2.0), T::zero()).powc(mu) * rgamma(mu + one);
    let value = y[0] * target / sum;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Range(format!("recurrence for J of order {order} at rho = {rho} failed")));
    }
    Ok(value)
}

/// Best-path evaluation: the converged large-argument expansion above the
/// switchover, the ascending series where it is well conditioned, and
/// Miller's recurrence elsewhere.
pub fn bessel_auto<T: Real>(order: BesselOrder, rho: T) -> Result<Complex<T>> {
    check_rho(rho)?;
    if rho == T::zero() {
        return value_at_zero(order);
    }
    if let Some(n) = order.negative_integer() {
        let v = bessel_auto(BesselOrder::real(n as f64), rho)?;
        return Ok(if n % 2 == 1 { -v } else { v });
    }
    if rho >= lit::<T>(order.switchover()) {
        let (v, ok) = asymptotic_adaptive(order, rho, 1e-17);
        if ok {
            return Ok(v);
        }
    }
    if let Ok(s) = series_sum(order, rho, 400) {
        let rho_f = rho.to_f64().unwrap_or(f64::MAX);
        let scale = lit::<T>(order.envelope(rho_f)).max(s.value.norm());
        if s.converged && s.largest_term <= lit::<T>(100.0) * scale {
            return Ok(s.value);
        }
    }
    bessel_recurrence(order, rho)
}

/// Dispatches to one evaluation route. `terms` bounds the series length or
/// sets the number of asymptotic corrections (default 8).
pub fn bessel_j<T: Real>(order: BesselOrder, rho: T, method: Method, terms: Option<usize>) -> Result<Complex<T>> {
    match method {
        Method::Series => bessel_series(order, rho, terms.unwrap_or(400)),
        Method::Asymptotic => bessel_asymptotic(order, rho, terms.unwrap_or(8)),
        Method::Recurrence => bessel_recurrence(order, rho),
        Method::Auto => bessel_auto(order, rho),
    }
}

/// `|J_{nu-1} + J_{nu+1} - (2 nu/rho) J_nu|` with all three values from
/// [`bessel_auto`].
pub fn recurrence_residual<T: Real>(order: BesselOrder, rho: T) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("recurrence residual needs rho > 0, got {rho}")));
    }
    let nu = order.value::<T>();
    let lo = bessel_auto(order.shifted(-1.0), rho)?;
    let mid = bessel_auto(order, rho)?;
    let hi = bessel_auto(order.shifted(1.0), rho)?;
    Ok((lo + hi - nu * (lit::<T>(2.0) / rho) * mid).norm())
}

/// Result of comparing the asymptotic path with the small-argument paths
/// on `[rho*, 2 rho*]`.
#[derive(Clone, Debug, Serialize)]
pub struct SwitchoverReport {
    pub order: BesselOrder,
    pub rho_star: f64,
    /// Largest `|asymptotic - reference|` divided by the envelope.
    pub max_rel_diff: f64,
    pub passed: bool,
}

/// Checks that the asymptotic expansion and the series (or, where the
/// series has lost its digits to cancellation, the recurrence) agree to
/// `1e-6` of the envelope across `[rho*, 2 rho*]`.
pub fn switchover_check(order: BesselOrder, samples: usize) -> Result<SwitchoverReport> {
    let rs = order.switchover();
    let mut worst = 0.0f64;
    for i in 0..samples.max(2) {
        let rho = rs * (1.0 + i as f64 / (samples.max(2) - 1) as f64);
        let (asym, _) = asymptotic_adaptive::<f64>(order, rho, 1e-17);
        let env = order.envelope(rho);
        let reference = match series_sum::<f64>(order, rho, 600) {
            Ok(s) if s.converged && s.largest_term * 1e-16 < 1e-9 * env => s.value,
            _ => bessel_recurrence(order, rho)?,
        };
        worst = worst.max((asym - reference).norm() / env);
    }
    Ok(SwitchoverReport { order, rho_star: rs, max_rel_diff: worst, passed: worst < 1e-6 })
}

/// Log-log fit of the truncation error of the expansion with `terms`
/// corrections against `rho` over `points` log-spaced arguments in
/// `[rho_min, rho_max]`.
///
/// The error at each argument is the largest deviation from the recurrence
/// value over eight phase offsets `rho + q pi/8`, which traces the envelope
/// of the oscillating remainder rather than its zeros.
pub fn remainder_slope(
    order: BesselOrder,
    terms: usize,
    rho_min: f64,
    rho_max: f64,
    points: usize,
) -> Result<crate::stats::LinearFit> {
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for rho in crate::stats::logspace(rho_min, rho_max, points) {
        let mut worst = 0.0f64;
        for q in 0..8 {
            let r = rho + q as f64 * std::f64::consts::PI / 8.0;
            let reference = bessel_recurrence::<f64>(order, r)?;
            let approx = asymptotic_expansion::<f64>(order, r, terms)?;
            worst = worst.max((approx - reference).norm());
        }
        xs.push(rho.ln());
        ys.push(worst.max(f64::MIN_POSITIVE).ln());
    }
    crate::stats::fit_line(&xs, &ys)
        .ok_or_else(|| Error::Domain("remainder fit needs at least two arguments".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn half_order(rho: f64) -> f64 {
        (2.0 / (PI * rho)).sqrt() * rho.sin()
    }

    #[test]
    fn series_half_order_closed_form() {
        for &rho in &[0.1, 1.0, PI, 7.5] {
            let v = bessel_series::<f64>(BesselOrder::real(0.5), rho, 200).unwrap();
            assert!((v.re - half_order(rho)).abs() < 1e-12, "rho={rho}");
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn series_at_zero() {
        let v = bessel_series::<f64>(BesselOrder::real(0.0), 0.0, 5).unwrap();
        assert_eq!(v, Complex::new(1.0, 0.0));
        assert!(bessel_series::<f64>(BesselOrder::real(0.0), -1.0, 5).is_err());
        assert!(bessel_series::<f64>(BesselOrder::new(-0.5, 1.0), 0.0, 5).is_err());
    }

    #[test]
    fn series_overflow_is_range_error() {
        let e = bessel_series::<f64>(BesselOrder::real(0.0), 2000.0, 5000).unwrap_err();
        assert!(matches!(e, Error::Range(_)));
    }

    #[test]
    fn brackets_of_order_zero() {
        let c = asymptotic_coeffs::<f64>(BesselOrder::real(0.0), 1).unwrap();
        assert!((c.bracket_odd.re + 0.25).abs() < 1e-15);
        assert!((c.b_k.re - 0.125).abs() < 1e-15);
        assert!((c.a_k.re + 9.0 / 128.0).abs() < 1e-15);
    }

    #[test]
    fn half_order_coefficients_vanish() {
        for k in 1..5 {
            let c = asymptotic_coeffs::<f64>(BesselOrder::real(0.5), k).unwrap();
            assert_eq!(c.a_k.norm(), 0.0);
            assert_eq!(c.b_k.norm(), 0.0);
        }
        let c = asymptotic_coeffs::<f64>(BesselOrder::real(1.5), 2).unwrap();
        assert_eq!(c.a_k.norm(), 0.0);
    }

    #[test]
    fn bracket_with_m_zero_is_one() {
        let v: Complex<f64> = bracket(Complex::new(2.3, -0.7), 0);
        assert_eq!(v, Complex::new(1.0, 0.0));
    }

    #[test]
    fn bracket_on_numerator_pole() {
        // nu = -2.5, m = 2: 1/2+nu+m = 0 is a pole but the ratio is finite
        let v: Complex<f64> = bracket(Complex::new(-2.5, 0.0), 2);
        let direct = bracket_polynomial(Complex::new(-2.5, 0.0), 2);
        assert!(v.re.is_finite());
        assert!((v - direct).norm() < 1e-14);
    }

    #[test]
    fn asymptotic_half_order_is_exact() {
        for &rho in &[1.5, 12.0, 40.0] {
            let v = asymptotic_expansion::<f64>(BesselOrder::real(0.5), rho, 3).unwrap();
            assert!((v.re - half_order(rho)).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_regime_guard() {
        let e = bessel_asymptotic::<f64>(BesselOrder::real(0.0), 5.0, 3).unwrap_err();
        assert!(matches!(e, Error::Regime(_)));
    }

    #[test]
    fn asymptotic_matches_reference_at_25() {
        let o = BesselOrder::real(0.0);
        let a = bessel_asymptotic::<f64>(o, 25.0, 4).unwrap();
        // 30-digit reference value of J_0(25)
        let exact = 0.096_266_783_275_958_116;
        assert!((a.re - exact).abs() / exact < 1e-10);
        let m = bessel_recurrence::<f64>(o, 25.0).unwrap();
        assert!((a - m).norm() / exact < 1e-10);
        // the f64 series at rho = 25 carries its cancellation error,
        // about 1e-16 times its largest term (~5e9)
        let s = bessel_series::<f64>(o, 25.0, 400).unwrap();
        assert!((a - s).norm() / exact < 1e-5);
    }

    #[test]
    fn recurrence_matches_series() {
        for &(a, b) in &[(0.0, 0.0), (1.0, 1.0), (2.5, 1.0), (-0.3, 0.4), (0.5, 0.0), (-1.0, 1.0)] {
            let o = BesselOrder::new(a, b);
            for &rho in &[0.3, 2.0, 6.0, 11.0] {
                let s = bessel_series::<f64>(o, rho, 400).unwrap();
                let m = bessel_recurrence::<f64>(o, rho).unwrap();
                let scale = o.envelope(rho).max(s.norm());
                let tol = if rho > 8.0 { 1e-11 } else { 1e-12 };
                assert!((s - m).norm() / scale < tol, "order {o} rho {rho}: {s} vs {m}");
            }
        }
    }

    #[test]
    fn negative_integer_orders_reflect() {
        let p = bessel_auto::<f64>(BesselOrder::real(1.0), 3.0).unwrap();
        let n = bessel_auto::<f64>(BesselOrder::real(-1.0), 3.0).unwrap();
        assert!((p + n).norm() < 1e-15);
    }

    #[test]
    fn recurrence_residual_examples() {
        assert!(recurrence_residual::<f64>(BesselOrder::real(1.0), 5.0).unwrap() < 1e-10);
        assert!(recurrence_residual::<f64>(BesselOrder::real(0.5), 2.0).unwrap() < 1e-12);
        assert!(recurrence_residual::<f64>(BesselOrder::new(2.0, 1.0), 10.0).unwrap() < 1e-9);
    }

    #[test]
    fn switchover_paths_agree() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 0.0), (1.0, 1.0), (2.5, 1.0), (0.0, 1.0)] {
            let r = switchover_check(BesselOrder::new(a, b), 24).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let v = bessel_auto::<f32>(BesselOrder::real(0.0), 2.0).unwrap();
        assert!((v.re - 0.223_890_78).abs() < 1e-5);
    }
}
