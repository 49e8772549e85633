use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherewave_core::decomp::{
    cap_partition, cone_cutoff, cone_total, influence_region, shell_cutoff, sphere_grid, CapGrid, InfluenceRegion,
};
use spherewave_core::multipliers::PhaseSign;
use spherewave_core::stats::fit_line;

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

#[test]
fn caps_partition_unity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [2, 3] {
        for j in [4, 6, 8] {
            let g = sphere_grid(j, dim).unwrap();
            let mut worst: f64 = 0.0;
            for _ in 0..2000 {
                let xi = random_direction(&mut rng, dim);
                let w = cap_partition(&g, &xi).unwrap();
                assert!(w.iter().all(|&(_, v)| (0.0..=1.0).contains(&v)));
                worst = worst.max((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs());
            }
            assert!(worst < 1e-12, "dim {dim} j {j}: {worst}");
        }
    }
}

#[test]
fn cap_weights_vanish_far_from_center() {
    let g = sphere_grid(6, 3).unwrap();
    let xi = [0.2, 0.5, -0.7];
    let n = (0.2f64 * 0.2 + 0.25 + 0.49).sqrt();
    let dir: Vec<f64> = xi.iter().map(|v| v / n).collect();
    let reach = 2f64.powf(-3.0 + 1.0);
    for (nu, _) in cap_partition(&g, &xi).unwrap() {
        let d: f64 = g.center(nu).iter().zip(&dir).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(d < reach);
    }
}

#[test]
fn isolated_cap_takes_all_weight() {
    // the second center sits 2 sin(1/4) ~ 0.49 away, beyond 2^{-j/2+1} = 0.25 at j = 6
    let (c, s) = (0.5f64.cos(), 0.5f64.sin());
    let g = CapGrid::from_points(6, 2, vec![c, s, 1f64.cos(), 1f64.sin()]).unwrap();
    let w = cap_partition(&g, &[3.0 * c, 3.0 * s]).unwrap();
    assert_eq!(w, vec![(0, 1.0)]);
}

#[test]
fn cap_count_slope() {
    for dim in [2usize, 3] {
        let js: Vec<f64> = (4..=10).map(|j| j as f64).collect();
        let counts: Vec<f64> = (4..=10).map(|j| (sphere_grid(j, dim).unwrap().len() as f64).log2()).collect();
        let fit = fit_line(&js, &counts).unwrap();
        let target = (dim as f64 - 1.0) / 2.0;
        assert!((fit.slope() - target).abs() < 0.15, "dim {dim}: slope {}", fit.slope());
    }
}

#[test]
fn circle_spacing_window() {
    for j in 1..=12 {
        let st = sphere_grid(j, 2).unwrap().spacing_stats();
        let s = 2f64.powf(-(j as f64) / 2.0);
        assert!(st.min >= s / 2.0 && st.max <= s, "j {j}: {st:?}");
    }
}

#[test]
fn cone_sums_telescope() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let x1: f64 = rng.gen_range(0.01..10.0);
        let x2: f64 = rng.gen_range(0.01..10.0);
        let x3: f64 = rng.gen_range(0.01..10.0);
        let cap = 6u32;
        let mut sum = 0.0;
        for t2 in 0..=cap {
            for t3 in 0..=cap {
                sum += cone_cutoff(&[t2, t3], &[x1, x2, x3]).unwrap();
            }
        }
        let expect = cone_total(Some(cap), &[x1, x2, x3]);
        assert!((sum - expect).abs() < 1e-12, "{sum} vs {expect}");
    }
}

#[test]
fn full_cone_support() {
    // Delta = 1 where |xi_1| > |xi_i| for all i, 0 where |xi_1| <= |xi_i|/2 for some i
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..4.0)).collect();
        let d = cone_total(None, &x);
        if x[1..].iter().all(|&v| x[0] > v) {
            assert_eq!(d, 1.0, "{x:?}");
        }
        if x[1..].iter().any(|&v| x[0] <= v / 2.0) {
            assert_eq!(d, 0.0, "{x:?}");
        }
    }
    // capped sums approach Delta as the cap grows
    let x = [3.0, 0.001, 0.5];
    assert!(cone_total(Some(4), &x) < 1.0);
    assert_eq!(cone_total(Some(12), &x), cone_total(None, &x));
}

#[test]
fn shells_telescope() {
    for &x in &[0.013, 0.4, 1.0, 3.7, 120.0] {
        let big_j = 9;
        let s: f64 = (-big_j..=big_j).map(|j| shell_cutoff(j, x)).sum();
        let expect = spherewave_core::decomp::bump(2f64.powi(-big_j) * x)
            - spherewave_core::decomp::bump(2f64.powi(big_j + 1) * x);
        assert!((s - expect).abs() < 1e-13);
        assert!((s - 1.0).abs() < 1e-13);
    }
}

#[test]
fn cone_derivatives_are_scale_bounded() {
    // |d^a delta_t| |xi_1|^{a_1} |xi_2|^{a_2} stays bounded uniformly in t
    let mut sups = Vec::new();
    for t in 0..8u32 {
        let mut sup: f64 = 0.0;
        for i in 0..400 {
            let x2 = 1.0 + (i % 20) as f64 * 0.1;
            let x1 = x2 * 2f64.powf(t as f64 - 1.0 + (i / 20) as f64 * 0.15);
            let f = |a: f64, b: f64| cone_cutoff(&[t], &[a, b]).unwrap();
            let (h1, h2) = (1e-4 * x1, 1e-4 * x2);
            let d1 = (f(x1 + h1, x2) - f(x1 - h1, x2)) / (2.0 * h1) * x1;
            let d2 = (f(x1, x2 + h2) - f(x1, x2 - h2)) / (2.0 * h2) * x2;
            let d11 = (f(x1 + h1, x2) - 2.0 * f(x1, x2) + f(x1 - h1, x2)) / (h1 * h1) * x1 * x1;
            let d12 = (f(x1 + h1, x2 + h2) - f(x1 + h1, x2 - h2) - f(x1 - h1, x2 + h2) + f(x1 - h1, x2 - h2))
                / (4.0 * h1 * h2)
                * x1
                * x2;
            sup = sup.max(d1.abs()).max(d2.abs()).max(d11.abs()).max(d12.abs());
        }
        sups.push(sup);
    }
    let (lo, hi) = sups.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi.is_finite() && hi / lo < 1.5, "{sups:?}");
}

#[test]
fn box_volumes_obey_bound() {
    let q = influence_region(0.125, 1.0, 2).unwrap();
    for j in q.levels() {
        let b = q.box_volume_bound(j);
        let predicted = 2f64.powi(-(j as i32)) * 2f64.powf(-(j as f64) / 2.0);
        assert!(b <= 4.0 * predicted + 1e-15);
    }
    assert_eq!(q.boxes().len(), q.levels().iter().map(|&j| sphere_grid(j, 2).unwrap().len()).sum::<usize>());
}

#[test]
fn region_starts_at_first_dyadic_level() {
    let q = influence_region(0.99, 1.0, 2).unwrap();
    assert_eq!(q.levels()[0], 1);
    let q = influence_region(0.1, 1.0, 3).unwrap();
    assert_eq!(q.levels()[0], 4);
    assert!(influence_region(1.0, 1.0, 2).is_err());
    assert!(influence_region(0.5, 0.0, 2).is_err());
}

#[test]
fn region_sign_mirrors() {
    let p = InfluenceRegion::new(0.125, 1.0, 2, 2, PhaseSign::Plus).unwrap();
    let m = InfluenceRegion::new(0.125, 1.0, 2, 2, PhaseSign::Minus).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let x = [rng.gen_range(-1.3..1.3), rng.gen_range(-1.3..1.3)];
        assert_eq!(p.contains(&x), m.contains(&[-x[0], -x[1]]));
    }
}

#[test]
fn region_volume_is_linear_in_r() {
    let rs: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let v: Vec<f64> = rs.iter().map(|&r| influence_region(r, 1.0, 2).unwrap().volume_by_grid(8, 8) / r).collect();
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 4.0, "{v:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cap_weights_are_homogeneous(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        prop_assume!(x * x + y * y + z * z > 1e-4);
        let g = sphere_grid(5, 3).unwrap();
        let w = cap_partition(&g, &[x, y, z]).unwrap();
        for lam in [0.5, 2.0, 7.0] {
            let wl = cap_partition(&g, &[lam * x, lam * y, lam * z]).unwrap();
            prop_assert_eq!(w.len(), wl.len());
            for (a, b) in w.iter().zip(&wl) {
                prop_assert_eq!(a.0, b.0);
                prop_assert!((a.1 - b.1).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bump_is_even_and_bounded(t in -5.0f64..5.0) {
        let b = spherewave_core::decomp::bump(t);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert_eq!(b, spherewave_core::decomp::bump(-t));
    }
}
