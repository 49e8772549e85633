use num_complex::Complex;
use proptest::prelude::*;
use spherewave_core::bessel::{
    asymptotic_coeffs, bessel_auto, bessel_recurrence, bessel_series, bracket, gamma, recurrence_residual,
    remainder_slope, BesselOrder,
};
use spherewave_core::stats::logspace;

// (a, b, rho, Re J, Im J) from 30-digit arithmetic
const REFERENCE: &[(f64, f64, f64, f64, f64)] = &[
    (0.0, 0.0, 0.7, 0.881200888607405295, 0.0),
    (0.0, 0.0, 33.3, 0.0633384859475212517, 0.0),
    (1.0, 1.0, 2.0, 0.874211097673325756, -0.222469792478649974),
    (1.0, 1.0, 57.0, -0.0860664897230671503, -0.225239157398217584),
    (2.5, 1.0, 0.9, -0.014887419066895217, -0.0430645420909392762),
    (2.5, 1.0, 24.0, 0.318757140202165618, 0.173491350487392242),
    (2.5, 1.0, 199.0, 0.124540466876441275, -0.0591229446526912995),
    (-0.5, 0.3, 4.4, -0.136725876148042122, -0.189142713816421095),
    (-1.0, 1.0, 13.0, 0.212180540799828947, 0.516810535080533144),
    (0.5, 0.0, 100.0, -0.0404021327162521237, 0.0),
    (3.0, 0.0, 8.0, -0.291132207065952249, 0.0),
    (0.0, 1.0, 45.5, 0.223382449549425109, 0.179173115491250074),
    (10.0, 0.0, 3.0, 0.0000129283516457158838, 0.0),
    (-2.5, 0.0, 6.0, -0.332205357707704241, 0.0),
];

#[test]
fn best_path_matches_high_precision_values() {
    for &(a, b, rho, re, im) in REFERENCE {
        let o = BesselOrder::new(a, b);
        let exact = Complex::new(re, im);
        let scale = exact.norm().max(1e-3 * o.envelope(rho));
        let auto = bessel_auto::<f64>(o, rho).unwrap();
        assert!((auto - exact).norm() / scale < 1e-12, "auto {o} rho {rho}: {auto} vs {exact}");
        let miller = bessel_recurrence::<f64>(o, rho).unwrap();
        assert!((miller - exact).norm() / scale < 1e-12, "recurrence {o} rho {rho}: {miller}");
    }
}

/// `J_nu(rho) = (rho/2)^nu / (Gamma(nu+1/2) Gamma(1/2)) * int_{-pi/2}^{pi/2}
/// e^{i rho sin t} cos^{2 nu} t dt`, composite Simpson with `n` panels.
fn integral_formula(nu: Complex<f64>, rho: f64, n: usize) -> Complex<f64> {
    let (lo, hi) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let h = (hi - lo) / n as f64;
    let f = |t: f64| {
        let c = t.cos();
        let w = if c <= 0.0 { Complex::new(0.0, 0.0) } else { (nu * 2.0 * c.ln()).exp() };
        Complex::new(0.0, rho * t.sin()).exp() * w
    };
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(lo + i as f64 * h) * wgt;
    }
    let integral = s * (h / 3.0);
    let pre = Complex::new(rho / 2.0, 0.0).powc(nu) / (gamma(nu + 0.5) * std::f64::consts::PI.sqrt());
    pre * integral
}

#[test]
fn series_matches_integral_formula() {
    for &(a, b, rho) in &[(1.0, 1.0, 2.0), (0.0, 0.0, 3.0), (2.5, 1.0, 5.0), (0.7, -0.4, 1.3)] {
        let nu = Complex::new(a, b);
        let quad = integral_formula(nu, rho, 200_000);
        let series = bessel_series::<f64>(BesselOrder::new(a, b), rho, 300).unwrap();
        assert!((quad - series).norm() < 1e-8, "order {a}+{b}i rho {rho}: {quad} vs {series}");
    }
}

#[test]
fn bracket_gamma_identity() {
    // [nu, m] Gamma(1/2 + nu - m) = Gamma(1/2 + nu + m) / m!
    for &(a, b) in &[(0.3, 0.0), (1.0, 1.0), (2.5, 1.0), (-0.2, 0.7)] {
        let nu = Complex::new(a, b);
        let mut fact = 1.0;
        for m in 0..8usize {
            if m > 0 {
                fact *= m as f64;
            }
            let lhs = bracket(nu, m) * gamma(nu + 0.5 - m as f64);
            let rhs = gamma(nu + 0.5 + m as f64) / fact;
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-12, "nu {nu} m {m}");
        }
    }
}

#[test]
fn coefficients_match_product_form() {
    // [nu, m] = prod_{j<=m} (4 nu^2 - (2j-1)^2) / (4^m m!)
    let nu = Complex::new(1.3, -0.6);
    for k in 1..6 {
        let c = asymptotic_coeffs::<f64>(BesselOrder::new(1.3, -0.6), k).unwrap();
        let prod = |m: usize| {
            let mut acc = Complex::new(1.0, 0.0);
            for j in 1..=m {
                let o = (2 * j - 1) as f64;
                acc = acc * (nu * nu * 4.0 - o * o) / (4.0 * j as f64);
            }
            acc
        };
        assert!((c.bracket_even - prod(2 * k)).norm() < 1e-10 * prod(2 * k).norm().max(1.0));
        assert!((c.bracket_odd - prod(2 * k - 1)).norm() < 1e-10 * prod(2 * k - 1).norm().max(1.0));
    }
}

#[test]
fn observed_remainder_law() {
    // truncation after N corrections decays like rho^{-(2N + 3/2)}
    for &(a, b) in &[(0.0, 0.0), (1.0, 1.0)] {
        for n in 1..=2 {
            let fit = remainder_slope(BesselOrder::new(a, b), n, 20.0, 200.0, 15).unwrap();
            let target = -(2.0 * n as f64 + 1.5);
            assert!((fit.slope() - target).abs() < 0.3, "order {a}+{b}i N={n}: slope {}", fit.slope());
        }
    }
    let fit = remainder_slope(BesselOrder::new(2.5, 1.0), 3, 20.0, 120.0, 15).unwrap();
    assert!((fit.slope() + 7.5).abs() < 0.3, "N=3 slope {}", fit.slope());
}

#[test]
fn norm_bound_constant_is_stable() {
    // sup_rho |rho^{-nu} J_nu(rho)| (1+rho)^{1/2+a} over [0.1, 100]
    for &a in &[0.0, 0.5, 1.0, 2.5] {
        for &b in &[0.0, 1.0] {
            let o = BesselOrder::new(a, b);
            let nu = Complex::new(a, b);
            let fit = |n: usize| {
                logspace(0.1, 100.0, n)
                    .into_iter()
                    .map(|rho| {
                        let j = bessel_auto::<f64>(o, rho).unwrap();
                        (j / Complex::new(rho, 0.0).powc(nu)).norm() * (1.0 + rho).powf(0.5 + a)
                    })
                    .fold(0.0, f64::max)
            };
            let (c1, c2) = (fit(400), fit(1600));
            assert!(c1.is_finite() && c2.is_finite());
            assert!((c2 / c1 - 1.0).abs() < 0.05, "order {o}: {c1} vs {c2}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_term_recurrence(a in -0.9f64..4.0, b in -1.5f64..1.5, rho in 0.2f64..80.0) {
        let o = BesselOrder::new(a, b);
        let r = recurrence_residual::<f64>(o, rho).unwrap();
        prop_assert!(r < 1e-9 * (1.0 + (a * a + b * b).sqrt() / rho), "residual {r}");
    }

    #[test]
    fn real_orders_give_real_values(a in 0.0f64..5.0, rho in 0.1f64..60.0) {
        let v = bessel_auto::<f64>(BesselOrder::real(a), rho).unwrap();
        prop_assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn conjugate_order_symmetry(a in 0.0f64..3.0, b in 0.1f64..1.5, rho in 0.1f64..60.0) {
        let p = bessel_auto::<f64>(BesselOrder::new(a, b), rho).unwrap();
        let m = bessel_auto::<f64>(BesselOrder::new(a, -b), rho).unwrap();
        prop_assert!((p.conj() - m).norm() < 1e-12 * BesselOrder::new(a, b).envelope(rho).max(p.norm()));
    }
}
