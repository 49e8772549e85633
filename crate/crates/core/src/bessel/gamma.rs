//! Complex Gamma function via the Lanczos approximation (g = 7, nine
//! coefficients) with reflection for `Re z < 1/2`.

use num_complex::Complex;

use crate::scalar::{lit, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// True when `z` is a pole of Gamma (a nonpositive integer).
pub fn is_pole<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi<T: Real>(x: T) -> T {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let r = x - two * (x / two).round();
    if r == T::zero() || r.abs() == T::one() {
        return T::zero();
    }
    let pi = T::PI();
    if r > half {
        (pi * (T::one() - r)).sin()
    } else if r < -half {
        -(pi * (T::one() + r)).sin()
    } else {
        (pi * r).sin()
    }
}

/// `cos(pi x)` with exact zeros at the half integers.
pub fn cos_pi<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    let r = x.abs() % lit::<T>(2.0);
    if r == half || r == lit::<T>(1.5) {
        return T::zero();
    }
    sin_pi(half - r)
}

/// `sin(pi z)` for complex `z`.
pub fn sin_pi_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let py = T::PI() * z.im;
    Complex::new(sin_pi(z.re) * py.cosh(), cos_pi(z.re) * py.sinh())
}

/// `ln Gamma(z)` up to a multiple of `2 pi i`, for `Re z >= 1/2`.
fn ln_gamma_right<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let z = z - one;
    let mut x = Complex::new(lit::<T>(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x = x + Complex::new(lit::<T>(c), T::zero()) / (z + Complex::new(lit::<T>(i as f64), T::zero()));
    }
    let t = z + Complex::new(lit::<T>(LANCZOS_G + 0.5), T::zero());
    let half_ln_2pi = lit::<T>(0.918_938_533_204_672_8);
    (z + Complex::new(lit::<T>(0.5), T::zero())) * t.ln() - t + x.ln()
        + Complex::new(half_ln_2pi, T::zero())
}

pub fn gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    if is_pole(z) {
        return Complex::new(T::infinity(), T::zero());
    }
    if z.re < lit::<T>(0.5) {
        let one = Complex::new(T::one(), T::zero());
        let pi = Complex::new(T::PI(), T::zero());
        return pi / (sin_pi_complex(z) * gamma(one - z));
    }
    ln_gamma_right(z).exp()
}

/// `1/Gamma(z)`, an entire function: exactly zero at the poles of Gamma.
pub fn rgamma<T: Real>(z: Complex<T>) -> Complex<T> {
    if is_pole(z) {
        return Complex::new(T::zero(), T::zero());
    }
    if z.re < lit::<T>(0.5) {
        let one = Complex::new(T::one(), T::zero());
        let pi = Complex::new(T::PI(), T::zero());
        return sin_pi_complex(z) * gamma(one - z) / pi;
    }
    (-ln_gamma_right(z)).exp()
}

/// Real-argument convenience wrapper.
pub fn gamma_real<T: Real>(x: T) -> T {
    gamma(Complex::new(x, T::zero())).re
}
