use num_complex::Complex;
use spherewave_core::decomp::sphere_grid;
use spherewave_core::grid::{GridSpec, LpExponent};
use spherewave_core::multipliers::MultiplierTable;
use spherewave_core::prober::{
    atom_height, h1_atom, inside_theory, knapp_leakage, knapp_profile, knapp_spreads, norm_ratio,
    random_band_limited, region_sweep, Family, FamilySizes,
};
use spherewave_core::sobolev::sobolev_params;
use spherewave_core::stats::compensated_sum;

#[test]
fn atoms_meet_their_constraints() {
    let spec = GridSpec::new(2, &[1, 1], 128, 4.0).unwrap();
    let mut x = [0.0; 2];
    for &r in &[0.25, 0.5, 1.0] {
        for c in [[0.0, 0.0], [0.3, -0.2]] {
            let a = h1_atom(r, &c, &spec).unwrap();
            let sum = compensated_sum(a.values().iter().map(|v| v.re));
            assert!(sum.abs() <= 1e-14, "r {r}: grid sum {sum}");
            assert!(a.sup_norm() <= atom_height(2, r) * (1.0 + 1e-12));
            for (flat, v) in a.values().iter().enumerate() {
                spec.point(flat, &mut x);
                if v.norm() != 0.0 {
                    assert!((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) < r * r);
                }
            }
        }
    }
}

#[test]
fn knapp_profiles_are_normalized_and_localized() {
    let spec = GridSpec::new(2, &[1, 1], 256, 2.0).unwrap();
    let j = 4;
    let cap = sphere_grid(j, 2).unwrap().caps().remove(0);
    let f = knapp_profile(&cap, &spec).unwrap();
    assert!((f.l2_norm() - 1.0).abs() < 1e-12);
    assert!(knapp_leakage(&f, &cap).unwrap() < 1e-10);
    // the frequency box is 2^j by 2^{j/2}, so the packet's transverse to radial
    // aspect grows like 2^{j/2}
    let aspect = |j: u32| {
        let cap = sphere_grid(j, 2).unwrap().caps().remove(0);
        let (radial, transverse) = knapp_spreads(&knapp_profile(&cap, &spec).unwrap(), &cap);
        transverse / radial
    };
    let (a2, a4) = (aspect(2), aspect(4));
    assert!(a4 > 1.4 * a2, "aspect {a2} at j = 2, {a4} at j = 4");
}

#[test]
fn knapp_rejects_unresolved_shell() {
    let spec = GridSpec::new(2, &[1, 1], 32, 2.0).unwrap();
    let cap = sphere_grid(5, 2).unwrap().caps().remove(0);
    assert!(knapp_profile(&cap, &spec).is_err());
}

#[test]
fn norm_ratio_ignores_scaling() {
    let spec = GridSpec::new(2, &[1, 1], 32, 2.0).unwrap();
    let op = MultiplierTable::<f64>::omega_hat(Complex::new(0.5, 0.0), &spec).unwrap();
    let params = sobolev_params(&[1, 1], &[0.0, 0.0], 2.0).unwrap();
    let f = random_band_limited(&spec, spec.nyquist() / 2.0, 2).unwrap();
    let p = LpExponent::new(3.0).unwrap();
    let a = norm_ratio(&op, &f, &params, 0.2, p).unwrap();
    let b = norm_ratio(&op, &f.scale(Complex::new(7.0, 0.0)), &params, 0.2, p).unwrap();
    assert!((a / b - 1.0).abs() < 1e-12);
    assert!(norm_ratio(&op, &f.scale(Complex::new(0.0, 0.0)), &params, 0.2, p).is_err());
}

#[test]
fn sweep_covers_the_parameter_grid() {
    // Nyquist 8 leaves Knapp levels 1 and 2
    let spec = GridSpec::new(2, &[1, 1], 64, 2.0).unwrap();
    let sizes = FamilySizes { random: 3, knapp_levels: 3, atom_radii: 2 };
    let rows = region_sweep(
        &[-0.5, 0.5],
        &[0.0],
        &[vec![0.0, 0.0], vec![0.25, 0.25]],
        &[2.0, 4.0],
        Family::Random,
        &spec,
        &sizes,
        1,
    )
    .unwrap();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!(r.ratio_max.is_finite() && r.ratio_max > 0.0);
        assert_eq!(r.inside_theory, inside_theory(r.alpha, r.r, r.s_total, r.p, 2));
        assert!(r.knapp_slope.is_none());
    }
    let knapp = region_sweep(&[0.5], &[0.0], &[vec![0.0, 0.0]], &[2.0], Family::Knapp, &spec, &sizes, 1).unwrap();
    assert!(knapp[0].knapp_slope.is_some());
    assert!(region_sweep(&[], &[0.0], &[vec![0.0, 0.0]], &[2.0], Family::Atoms, &spec, &sizes, 1).unwrap().is_empty());
}
