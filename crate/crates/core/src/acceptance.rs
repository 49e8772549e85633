//! End-to-end acceptance checks shared by the `acceptance` test target and
//! the `selftest` subcommand. Every check returns a pass flag and a one-line
//! summary of what it measured.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bessel::{recurrence_residual, remainder_slope, BesselOrder};
use crate::decomp::{cap_partition, influence_region, sphere_grid};
use crate::error::Result;
use crate::grid::{Direction, GridSpec};
use crate::kernelcheck::{
    cone_indices_first, diff_scan, diff_shifts, fit_l1_law, l1_scan, tail_scan_many, worst_group_spread, KernelSetup,
    KernelSymbol,
};
use crate::multipliers::{
    apply_multiplier, omega_hat, omega_hat_series, omega_order, sample_omega_kernel, MultiplierTable, OmegaParams,
    PhaseSign, SigmaSymbol,
};
use crate::prober::{atom_height, h1_atom, random_band_limited, random_forcing};
use crate::sobolev::sobolev_params;
use crate::stats::{compensated_sum, fit_line, logspace, spread};
use crate::wave::{apriori_check, residual, solve_wave, space_time_l2, Manufactured, WaveConfig};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const TITLES: [&str; 14] = [
    "Bessel three-term recurrence",
    "asymptotic remainder law",
    "series form of the Omega transform",
    "ball-indicator transform",
    "cap partition of unity and cap count",
    "region of influence volume",
    "localized kernel L1 law",
    "localized kernel difference law",
    "localized kernel tail law",
    "wave solver",
    "a priori probe",
    "Plancherel bound",
    "H1 atom constraints",
    "selftest end to end",
];

/// Seconds allowed for criteria 1-13 together.
pub const SELFTEST_BUDGET: f64 = 600.0;

fn finish(id: u32, start: Instant, out: Result<(bool, String)>) -> CriterionResult {
    let (passed, detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title: TITLES[id as usize - 1], passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Runs one of criteria 1-13.
pub fn run_one(id: u32) -> CriterionResult {
    let start = Instant::now();
    let out = match id {
        1 => bessel_recurrence_check(),
        2 => remainder_law_check(),
        3 => series_identity_check(),
        4 => ball_transform_check(),
        5 => partition_check(),
        6 => region_check(),
        7 => l1_law_check(),
        8 => diff_law_check(),
        9 => tail_law_check(),
        10 => wave_check(),
        11 => apriori_probe_check(),
        12 => plancherel_check(),
        13 => atom_check(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let mut r = finish(id, start, out);
    if let Some(limit) = time_limit(id) {
        if r.seconds > limit {
            r.passed = false;
            r.detail.push_str(&format!("; runtime {:.1} s over {limit} s", r.seconds));
        }
    }
    r
}

fn time_limit(id: u32) -> Option<f64> {
    match id {
        1 | 3 => Some(5.0),
        2 | 4 => Some(10.0),
        7 => Some(180.0),
        10 => Some(30.0),
        _ => None,
    }
}

/// Criteria 1-13 in order, then criterion 14 from their outcome and total
/// time. `progress` sees each result as soon as it is known.
pub fn run_all(mut progress: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let start = Instant::now();
    let mut out = Vec::with_capacity(14);
    for id in 1..=13 {
        let r = run_one(id);
        progress(&r);
        out.push(r);
    }
    let total = start.elapsed().as_secs_f64();
    let failed: Vec<String> = out.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    let passed = failed.is_empty() && total < SELFTEST_BUDGET;
    let detail = if failed.is_empty() {
        format!("criteria 1-13 passed in {total:.1} s (budget {SELFTEST_BUDGET} s)")
    } else {
        format!("criteria {} failed; 1-13 took {total:.1} s", failed.join(","))
    };
    let r = CriterionResult { id: 14, title: TITLES[13], passed, detail, seconds: total };
    progress(&r);
    out.push(r);
    out
}

pub fn format_line(r: &CriterionResult) -> String {
    format!(
        "criterion {:>2} {} [{}] ({:.1} s): {}",
        r.id,
        if r.passed { "PASS" } else { "FAIL" },
        r.title,
        r.seconds,
        r.detail
    )
}

fn bessel_recurrence_check() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &a in &[0.0, 0.5, 1.0, 2.5] {
        for &b in &[0.0, 1.0] {
            for rho in logspace(0.5, 50.0, 20) {
                worst = worst.max(recurrence_residual::<f64>(BesselOrder::new(a, b), rho)?);
            }
        }
    }
    Ok((worst < 1e-9, format!("max residual {worst:.2e} (limit 1e-9)")))
}

fn remainder_law_check() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(a, b) in &[(0.0, 0.0), (1.0, 1.0)] {
        for n in 1..=3usize {
            let fit = remainder_slope(BesselOrder::new(a, b), n, 20.0, 200.0, 15)?;
            let target = -(2.0 * n as f64 + 0.5);
            ok &= (fit.slope() - target).abs() <= 0.3;
            parts.push(format!("nu={a}+{b}i N={n}: {:.2} vs {target}", fit.slope()));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn series_identity_check() -> Result<(bool, String)> {
    let alphas = [
        Complex::new(1.0, 0.0),
        Complex::new(0.5, 0.0),
        Complex::new(0.0, 0.0),
        Complex::new(-0.5, 0.3),
    ];
    let mut worst = 0.0f64;
    for dim in [2usize, 3] {
        for &alpha in &alphas {
            let order = omega_order(alpha, dim);
            for i in 0..=80 {
                let x = 2.0 * i as f64 / 80.0;
                let direct = omega_hat::<f64>(alpha, x, dim)?;
                let series = omega_hat_series::<f64>(Complex::new(1.0, 0.0) - alpha, x, dim, 60);
                let scale = if x == 0.0 {
                    direct.norm()
                } else {
                    direct.norm().max(x.powf(-order.a) * order.envelope(2.0 * std::f64::consts::PI * x))
                };
                worst = worst.max((direct - series).norm() / scale);
            }
        }
    }
    Ok((worst < 1e-8, format!("max relative deviation {worst:.2e} over |xi| <= 2 (limit 1e-8)")))
}

fn ball_transform_check() -> Result<(bool, String)> {
    let spec = GridSpec::new(2, &[1, 1], 256, 8.0)?;
    let alpha = Complex::new(1.0, 0.0);
    let sampled = sample_omega_kernel::<f64>(alpha, &spec)?.transform(Direction::Forward)?;
    let limit = spec.samples_per_axis() as f64 / (8.0 * spec.half_width());
    let sup = std::f64::consts::PI;
    let mut xi = vec![0.0; 2];
    let mut worst = 0.0f64;
    for (flat, v) in sampled.values().iter().enumerate() {
        spec.frequency_point(flat, &mut xi);
        let xn = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        if xn <= limit {
            worst = worst.max((v - omega_hat::<f64>(alpha, xn, 2)?).norm() / sup);
        }
    }
    Ok((worst < 0.02, format!("max error {:.3}% of sup|omega_hat| for |xi| <= {limit} (limit 2%)", worst * 100.0)))
}

fn partition_check() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for dim in [2usize, 3] {
        for j in [4u32, 6, 8] {
            let grid = sphere_grid(j, dim)?;
            for _ in 0..10_000 {
                let xi: Vec<f64> = loop {
                    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n2: f64 = v.iter().map(|x| x * x).sum();
                    if n2 > 1e-6 && n2 <= 1.0 {
                        break v;
                    }
                };
                let w = cap_partition(&grid, &xi)?;
                worst = worst.max((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs());
            }
        }
    }
    let mut ok = worst < 1e-12;
    let mut parts = vec![format!("max |sum - 1| {worst:.1e}")];
    for dim in [2usize, 3] {
        let js: Vec<f64> = (4..=10).map(|j| j as f64).collect();
        let counts = (4..=10u32)
            .map(|j| Ok((sphere_grid(j, dim)?.len() as f64).log2()))
            .collect::<Result<Vec<f64>>>()?;
        let slope = fit_line(&js, &counts).map(|f| f.slope()).unwrap_or(f64::NAN);
        let target = (dim as f64 - 1.0) / 2.0;
        ok &= (slope - target).abs() <= 0.15;
        parts.push(format!("S^{} count slope {slope:.3} vs {target}", dim - 1));
    }
    Ok((ok, parts.join("; ")))
}

fn region_check() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for dim in [2usize, 3] {
        let rs: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
        let (radial, angular) = if dim == 2 { (8, 8) } else { (8, 4) };
        let per_r = rs
            .iter()
            .map(|&r| Ok(influence_region(r, 1.0, dim)?.volume_by_grid(radial, angular) / r))
            .collect::<Result<Vec<f64>>>()?;
        let sp = spread(&per_r);
        let x: Vec<f64> = rs.iter().map(|r| (1.0 / r).ln()).collect();
        let y: Vec<f64> = per_r.iter().map(|v| v.ln()).collect();
        let slope = fit_line(&x, &y).map(|f| f.slope()).unwrap_or(f64::NAN);
        ok &= sp < 4.0 && slope <= 0.1;
        // Monte-Carlo cross-check of the grid count at the largest radius
        let (mc, se) = influence_region(rs[0], 1.0, dim)?.volume_by_sampling(1_000_000, 17);
        let grid = per_r[0] * rs[0];
        parts.push(format!(
            "N={dim}: |Q|/r spread {sp:.2}, trend {slope:.3}, grid vs sampled volume {grid:.4e} / {mc:.4e} +- {se:.1e}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// Grid and symbol of the N = 2 kernel scans.
pub fn kernel_setup_2d() -> KernelSetup {
    KernelSetup::new(&[1, 1], 1.5, KernelSymbol::product(&[0.26, 0.26]))
}

fn l1_law_check() -> Result<(bool, String)> {
    let setup = kernel_setup_2d();
    let jobs: Vec<(u32, Vec<Vec<u32>>)> = (5..=8).map(|j| (j, cone_indices_first(j, 1))).collect();
    let rows = l1_scan(&setup, &jobs)?;
    let law = fit_l1_law(&rows).ok_or_else(|| crate::Error::Domain("L1 fit failed".into()))?;
    let t = law.t_slopes[0];
    let ok = (-0.8..=-0.2).contains(&t) && law.r_squared > 0.9 && law.t0_j_slope <= 0.1;
    Ok((
        ok,
        format!(
            "t-slope {t:.3} (window [-0.8, -0.2]), R^2 {:.3}, t=0 j-slope {:.3}, {} rows",
            law.r_squared,
            law.t0_j_slope,
            rows.len()
        ),
    ))
}

fn diff_law_check() -> Result<(bool, String)> {
    let setup = kernel_setup_2d();
    let mut rows = Vec::new();
    for j in 5..=7u32 {
        for t in 0..=1u32 {
            rows.extend(diff_scan(&setup, j, &[t], &diff_shifts(j, 2))?);
        }
    }
    let worst = worst_group_spread(&rows);
    Ok((worst < 10.0, format!("worst ratio spread {worst:.2} over y per (j, t) (limit 10)")))
}

fn tail_law_check() -> Result<(bool, String)> {
    let setup = kernel_setup_2d();
    let c = 4.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.125, 0.0625] {
        let first = (1.0 / r as f64).log2().round() as u32 + 1;
        let jobs: Vec<(u32, Vec<Vec<u32>>)> = (first..=8).map(|j| (j, vec![vec![0], vec![1]])).collect();
        let ys = vec![vec![0.0, 0.0], vec![r / 2.0, 0.0]];
        let rows = tail_scan_many(&setup, &jobs, r, c, &ys)?;
        for t in 0..=1u32 {
            let ratios: Vec<f64> = rows.iter().filter(|row| row.t[0] == t).map(|row| row.ratio).collect();
            let sp = spread(&ratios);
            let top = ratios.iter().cloned().fold(0.0, f64::max);
            ok &= sp < 10.0;
            parts.push(format!("r={r} t={t}: spread {sp:.2e}, max {top:.2e}"));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn wave_check() -> Result<(bool, String)> {
    let m = Manufactured { k: vec![0.5, 1.0], omega: std::f64::consts::PI };
    let spec = GridSpec::new(2, &[1, 1], 64, 1.0)?;
    let run = |steps: usize| -> Result<(f64, f64)> {
        let c = WaveConfig::new(spec.clone(), 1.0, steps)?;
        let g = m.sample_g::<f64>(&c);
        let u = solve_wave(&g, &c)?;
        let exact = m.sample_u::<f64>(&c);
        let diff = u.iter().zip(&exact).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
        let err = space_time_l2(&diff, c.dt()) / space_time_l2(&exact, c.dt());
        let res = space_time_l2(&residual(&u, &g, &c)?, c.dt()) / space_time_l2(&g, c.dt());
        Ok((err, res))
    };
    let (e1, r1) = run(128)?;
    let (e2, r2) = run(256)?;
    let (ratio, rratio) = (e1 / e2, r1 / r2);
    let ok = e2 < 1e-3 && (ratio - 4.0).abs() <= 1.2 && (rratio - 4.0).abs() <= 1.2;
    Ok((
        ok,
        format!("error {e2:.2e} at 256 steps, error ratio {ratio:.2}, residual {r2:.2e} with ratio {rratio:.2}"),
    ))
}

fn apriori_probe_check() -> Result<(bool, String)> {
    let spec = GridSpec::new(3, &[2, 1], 32, 2.0)?;
    let config = WaveConfig::new(spec.clone(), 1.0, 32)?;
    let params = sobolev_params(&[2, 1], &[0.4, 0.3], 2.0)?;
    let mut ratios = Vec::new();
    for k in 0..20u64 {
        let g = random_forcing(&config, spec.nyquist() / 2.0, 100 + k)?;
        let rows = apriori_check(&g, &params, &config)?;
        ratios.push(rows.last().map(|r| r.ratio).unwrap_or(f64::NAN));
    }
    let sp = spread(&ratios);
    let top = ratios.iter().cloned().fold(0.0, f64::max);
    Ok((sp < 10.0 && top.is_finite(), format!("20 draws: max ratio {top:.3}, spread {sp:.2} (limit 10)")))
}

fn plancherel_check() -> Result<(bool, String)> {
    let spec = GridSpec::new(2, &[1, 1], 64, 4.0)?;
    // alpha - r = -(N-1)/2 and s = 0 put sigma in S^0
    let sym = SigmaSymbol::new(OmegaParams::real(0.0, 0.5), &[0.0, 0.0], &[1, 1], 2)?;
    let tables = [
        MultiplierTable::<f64>::sigma(&sym, PhaseSign::Plus, true, &spec)?,
        MultiplierTable::<f64>::sigma(&sym, PhaseSign::Minus, true, &spec)?,
        MultiplierTable::<f64>::sigma(&sym, PhaseSign::Plus, false, &spec)?,
    ];
    let mut worst = 0.0f64;
    for table in &tables {
        let sup = table.sup();
        for k in 0..50u64 {
            let f = random_band_limited(&spec, spec.nyquist(), 500 + k)?;
            let ratio = apply_multiplier(&f, table)?.l2_norm() / f.l2_norm();
            worst = worst.max(ratio / sup);
        }
    }
    Ok((worst <= 1.0 + 1e-9, format!("max ratio / sup|sigma| = {worst:.12} over 3 tables x 50 fields")))
}

fn atom_check() -> Result<(bool, String)> {
    let mut worst_mean = 0.0f64;
    let mut worst_size = 0.0f64;
    let mut outside = 0usize;
    let cases: [(GridSpec, Vec<f64>, Vec<Vec<f64>>); 2] = [
        (
            GridSpec::new(2, &[1, 1], 128, 4.0)?,
            vec![0.25, 0.5, 1.0, 1.7],
            vec![vec![0.0, 0.0], vec![0.3, -0.2], vec![-1.1, 0.77]],
        ),
        (GridSpec::new(3, &[2, 1], 32, 4.0)?, vec![0.6, 1.0, 1.5], vec![vec![0.0; 3], vec![0.3, -0.2, 0.1]]),
    ];
    let mut count = 0;
    for (spec, radii, centers) in &cases {
        let n = spec.dim_total();
        let mut x = vec![0.0; n];
        for &r in radii {
            for c in centers {
                let a = h1_atom(r, c, spec)?;
                count += 1;
                worst_mean = worst_mean.max(compensated_sum(a.values().iter().map(|v| v.re)).abs());
                worst_size = worst_size.max(a.sup_norm() / atom_height(n, r) - 1.0);
                for (flat, v) in a.values().iter().enumerate() {
                    spec.point(flat, &mut x);
                    let d2: f64 = x.iter().zip(c).map(|(p, q)| (p - q).powi(2)).sum();
                    if v.norm() != 0.0 && d2 >= r * r {
                        outside += 1;
                    }
                }
            }
        }
    }
    let ok = worst_mean <= 1e-14 && worst_size <= 1e-12 && outside == 0;
    Ok((
        ok,
        format!("{count} atoms: max |grid sum| {worst_mean:.1e}, size excess {worst_size:.1e}, {outside} values outside B_r"),
    ))
}
