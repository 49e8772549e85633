use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use spherewave_core::grid::GridSpec;
use spherewave_core::multipliers::{
    apply_multiplier, b_s_hat, check_symbol, omega_hat, omega_hat_series, MultiplierTable, OmegaParams, PhaseSign,
    Provenance, SigmaSymbol, SymbolClass,
};
use spherewave_core::prober::random_band_limited;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

// closed forms of |xi|^{-nu} J_nu(2 pi |xi|) at half-integer orders
fn ball_1d(x: f64) -> f64 {
    (2.0 * PI * x).sin() / (PI * x)
}

fn ball_3d(x: f64) -> f64 {
    let z = 2.0 * PI * x;
    x.powf(-1.5) * (2.0 / (PI * z)).sqrt() * (z.sin() / z - z.cos())
}

#[test]
fn omega_hat_matches_closed_forms() {
    for &x in &[0.05, 0.3, 0.9, 1.27, 2.5, 4.0, 7.3, 15.0, 40.0] {
        let a = omega_hat::<f64>(c(1.0), x, 1).unwrap();
        assert!((a.re - ball_1d(x)).abs() < 1e-12 && a.im.abs() < 1e-14, "N=1 x={x}: {a}");
        let b = omega_hat::<f64>(c(1.0), x, 3).unwrap();
        assert!((b.re - ball_3d(x)).abs() < 1e-12 * (1.0 + x.powi(-2)), "N=3 x={x}: {b}");
        // alpha = 0 in R^3 is sin(2 pi |xi|)/(pi |xi|)
        let s = omega_hat::<f64>(c(0.0), x, 3).unwrap();
        assert!((s.re - ball_1d(x)).abs() < 1e-12, "alpha=0 x={x}: {s}");
    }
    // limit at the origin: volume of the unit ball
    assert!((omega_hat::<f64>(c(1.0), 0.0, 2).unwrap().re - PI).abs() < 1e-14);
    assert!((omega_hat::<f64>(c(1.0), 0.0, 3).unwrap().re - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!(omega_hat::<f64>(c(1.0), -1.0, 2).is_err());
}

#[test]
fn omega_hat_is_continuous_at_the_branch_switch() {
    // direct evaluation switches from the series to Bessel routines at 2 pi |xi| = 8
    let x0 = 8.0 / (2.0 * PI);
    for alpha in [c(1.0), Complex::new(-0.5, 0.3), Complex::new(0.25, -1.0)] {
        for dim in [2, 3] {
            let lo = omega_hat::<f64>(alpha, x0 * (1.0 - 1e-12), dim).unwrap();
            let hi = omega_hat::<f64>(alpha, x0 * (1.0 + 1e-12), dim).unwrap();
            assert!((lo - hi).norm() < 1e-9 * lo.norm().max(1e-3), "{alpha} N={dim}: {lo} vs {hi}");
        }
    }
}

#[test]
fn series_form_at_small_frequencies() {
    for dim in [2, 3] {
        for alpha in [c(1.0), c(0.5), c(0.0), Complex::new(-0.5, 0.3)] {
            for &x in &[0.0, 0.1, 0.4, 0.75] {
                let direct = omega_hat::<f64>(alpha, x, dim).unwrap();
                let series = omega_hat_series::<f64>(c(1.0) - alpha, x, dim, 60);
                assert!((direct - series).norm() <= 1e-12 * direct.norm().max(1e-3), "{alpha} {x}");
            }
        }
    }
}

#[test]
fn unit_table_is_the_identity() {
    let spec = GridSpec::new(2, &[1, 1], 32, 2.0).unwrap();
    let f = random_band_limited(&spec, spec.nyquist(), 1).unwrap();
    let ones = MultiplierTable::<f64>::from_fn(spec.clone(), Provenance::Custom, |_| c(1.0)).unwrap();
    let g = apply_multiplier(&f, &ones).unwrap();
    assert!(g.sub(&f).unwrap().sup_norm() < 1e-13);
}

#[test]
fn unimodular_multiplier_preserves_l2() {
    let spec = GridSpec::new(2, &[1, 1], 64, 4.0).unwrap();
    let phase = MultiplierTable::<f64>::from_fn(spec.clone(), Provenance::Custom, |xi| {
        Complex::new(0.0, 2.0 * PI * (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()).exp()
    })
    .unwrap();
    for seed in 0..5 {
        let f = random_band_limited(&spec, spec.nyquist(), seed).unwrap();
        let g = apply_multiplier(&f, &phase).unwrap();
        assert!((g.l2_norm() / f.l2_norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bessel_potential_inverts() {
    let spec = GridSpec::new(3, &[2, 1], 16, 2.0).unwrap();
    let f = random_band_limited(&spec, spec.nyquist(), 7).unwrap();
    let b = MultiplierTable::<f64>::b_s(&[0.4, 0.3], &spec).unwrap();
    let back = apply_multiplier(&apply_multiplier(&f, &b).unwrap(), &b.reciprocal().unwrap()).unwrap();
    assert!(back.sub(&f).unwrap().sup_norm() < 1e-12 * f.sup_norm());
    assert!(b.sup() >= 1.0);
}

#[test]
fn class_check_accepts_and_rejects() {
    let spec = GridSpec::new(2, &[1, 1], 32, 2.0).unwrap();
    let zero = SymbolClass::new(vec![0.0, 0.0]);
    assert!(check_symbol(|_| c(1.0), &spec, &zero, 2).unwrap().passed);

    let rho = SymbolClass::new(vec![0.5, 0.0]);
    let decaying = |xi: &[f64]| c((1.0 + xi[0] * xi[0]).powf(-0.25));
    assert!(check_symbol(decaying, &spec, &rho, 2).unwrap().passed);

    // |xi| grows without bound, so its S^0 ratio drifts with the frequency reach
    let growing = |xi: &[f64]| c((xi[0] * xi[0] + xi[1] * xi[1]).sqrt());
    let report = check_symbol(growing, &spec, &zero, 2).unwrap();
    assert!(!report.passed);
    assert!(report.rows.iter().any(|r| r.drift.unwrap() > 2.0));
}

#[test]
fn order_zero_sigma_has_flat_amplitude() {
    // alpha - r = -(N-1)/2 and s = 0 give decay order 0
    let sym = SigmaSymbol::new(OmegaParams::real(0.0, 0.5), &[0.0, 0.0], &[1, 1], 2).unwrap();
    assert!(sym.class().m().abs() < 1e-15);
    let dir = [0.6, 0.8];
    let at = |lam: f64| sym.eval(&[lam * dir[0], lam * dir[1]], PhaseSign::Plus).norm();
    let ratio = at(1000.0) / at(100.0);
    assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
    assert_eq!(sym.eval(&[0.3, 0.4], PhaseSign::Minus), c(0.0));
}

#[test]
fn sigma_amplitudes_rebuild_the_multiplier() {
    let alpha = Complex::new(0.3, 0.4);
    let sym = SigmaSymbol::new(OmegaParams::new(alpha, 0.2), &[0.1, 0.2], &[1, 1], 3).unwrap();
    for &lam in &[6.0, 12.0, 30.0] {
        let xi = [0.6 * lam, 0.8 * lam];
        let direct = omega_hat::<f64>(alpha, lam, 2).unwrap()
            * (1.0 + lam * lam).powf(0.1)
            * (1.0 + xi[0] * xi[0]).powf(-0.05)
            * (1.0 + xi[1] * xi[1]).powf(-0.1);
        let envelope = lam.powf(-0.8) * (1.0 + lam * lam).powf(0.1) / PI;
        let err = (sym.reconstruct(&xi) - direct).norm() / envelope;
        assert!(err < 1e-5, "|xi| = {lam}: {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_potential_weight_is_monotone(s in 0.0f64..1.0, x in 0.0f64..50.0, dx in 0.0f64..10.0) {
        let a: f64 = b_s_hat(&[s, s], &[x, 1.0]).unwrap();
        let b: f64 = b_s_hat(&[s, s], &[x + dx, 1.0]).unwrap();
        prop_assert!(a >= 1.0 && b >= a);
    }

    #[test]
    fn conjugate_order_gives_conjugate_transform(a in -0.9f64..1.5, b in -1.0f64..1.0, x in 0.0f64..5.0) {
        let v = omega_hat::<f64>(Complex::new(a, b), x, 2).unwrap();
        let w = omega_hat::<f64>(Complex::new(a, -b), x, 2).unwrap();
        prop_assert!((v - w.conj()).norm() <= 1e-12 * v.norm().max(1e-6));
    }

    #[test]
    fn phase_sign_round_trips(plus in any::<bool>()) {
        let s = if plus { PhaseSign::Plus } else { PhaseSign::Minus };
        prop_assert_eq!(s.flip().flip(), s);
        prop_assert_eq!(s.value() * s.flip().value(), -1.0);
    }
}
