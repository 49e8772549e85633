use spherewave_core::grid::GridSpec;
use spherewave_core::kernelcheck::{
    diff_scan, l1_mass, l1_scan, lambda_kernel, reconstruction_error, synthesize, tail_scan, KernelSetup,
    KernelSymbol, ShellSpectrum,
};
use spherewave_core::multipliers::PhaseSign;
use spherewave_core::prober::random_band_limited;
use spherewave_core::Error;

fn setup() -> KernelSetup {
    KernelSetup::new(&[1, 1], 1.5, KernelSymbol::product(&[0.26, 0.26]))
}

#[test]
fn kernels_have_zero_mean() {
    let s = setup();
    let spec = s.grid_for(5).unwrap();
    for t in [[0u32], [1]] {
        let k = lambda_kernel(5, &t, &s.symbol, PhaseSign::Plus, &spec).unwrap();
        let mean: f64 = k.values().iter().map(|v| v.re).sum::<f64>() * spec.cell_volume();
        assert!(mean.abs() < 1e-12 * l1_mass(&k), "{mean}");
    }
}

#[test]
fn kernel_sum_matches_telescoped_multiplier() {
    let s = setup();
    let spec = s.grid_for(5).unwrap();
    let f = random_band_limited(&spec, spec.nyquist(), 21).unwrap();
    let err = reconstruction_error(&s, &spec, 2..=5, 3, &f).unwrap();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn grid_shift_is_a_roll() {
    let s = setup();
    let spec = s.grid_for(4).unwrap();
    let shell = ShellSpectrum::new(4, &spec, &s.symbol, PhaseSign::Minus).unwrap();
    let spectrum = shell.spectrum(&[1]).unwrap();
    let k0 = synthesize(&spec, &spectrum, None).unwrap();
    let (a, b) = (3usize, 5usize);
    let y = [a as f64 * spec.spacing(), b as f64 * spec.spacing()];
    let ky = synthesize(&spec, &spectrum, Some(&y)).unwrap();
    let m = spec.samples_per_axis();
    let mut idx = [0usize; 2];
    let mut worst = 0.0f64;
    for flat in 0..spec.len() {
        spec.unravel(flat, &mut idx);
        let src = spec.ravel(&[(idx[0] + m - a) % m, (idx[1] + m - b) % m]);
        worst = worst.max((ky.values()[flat] - k0.values()[src]).norm());
    }
    assert!(worst < 1e-12 * k0.sup_norm(), "{worst}");
}

#[test]
fn difference_masses_are_bounded() {
    let s = setup();
    let ys = vec![vec![0.0, 0.0], vec![0.01, 0.0], vec![0.3, -0.2]];
    let rows = diff_scan(&s, 5, &[0], &ys).unwrap();
    assert_eq!(rows[0].measured, 0.0);
    for r in &rows {
        assert!(r.measured <= 2.0 * r.l1_mass * (1.0 + 1e-12));
    }
    assert!(rows[1].measured < rows[2].measured);
}

#[test]
fn tail_masses_are_bounded_and_shrink_with_c() {
    let s = setup();
    let ys = vec![vec![0.0, 0.0]];
    let narrow = tail_scan(&s, 5, &[0], 0.125, 1.0, &ys).unwrap();
    let wide = tail_scan(&s, 5, &[0], 0.125, 4.0, &ys).unwrap();
    assert!(narrow[0].measured <= narrow[0].l1_mass);
    assert!(wide[0].measured <= narrow[0].measured * (1.0 + 1e-12));
}

#[test]
fn tail_needs_fine_enough_shell() {
    let s = setup();
    match tail_scan(&s, 3, &[0], 0.125, 4.0, &[vec![0.0, 0.0]]) {
        Err(Error::Domain(msg)) => assert!(msg.contains("2^j > 1/r"), "{msg}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn undersampled_shell_is_rejected() {
    let s = setup();
    let spec = GridSpec::new(2, &[1, 1], 64, 1.5).unwrap();
    match ShellSpectrum::new(5, &spec, &s.symbol, PhaseSign::Plus) {
        Err(Error::Resolution { required_samples, .. }) => assert_eq!(required_samples, 384),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("expected a resolution error"),
    }
}

#[test]
fn l1_mass_is_stable_under_refinement() {
    let base = setup();
    let mut fine = setup();
    fine.oversample = 2.0;
    let jobs = vec![(5u32, vec![vec![0u32], vec![1]])];
    let a = l1_scan(&base, &jobs).unwrap();
    let b = l1_scan(&fine, &jobs).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.l1_mass / y.l1_mass - 1.0).abs() < 0.05, "{} vs {}", x.l1_mass, y.l1_mass);
    }
}
