use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, Write};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spherewave_core::acceptance::{format_line, run_all, run_one};
use spherewave_core::bessel::{bessel_j, BesselOrder, Method};
use spherewave_core::decomp::{cap_partition, influence_region, sphere_grid};
use spherewave_core::grid::{Field, GridSpec};
use spherewave_core::io::{read_field, write_field};
use spherewave_core::kernelcheck::{
    cone_indices_first, diff_scan, diff_shifts, l1_scan, tail_scan_many, KernelScanRow, KernelSetup, KernelSymbol,
};
use spherewave_core::multipliers::{check_symbol, omega_hat, OmegaParams, PhaseSign, SigmaSymbol, SymbolClass};
use spherewave_core::prober::{random_forcing, region_sweep, Family, FamilySizes};
use spherewave_core::sobolev::{sobolev_norm, sobolev_params};
use spherewave_core::wave::{apriori_check, manufactured_error, sample_slices, solve_wave, Manufactured, WaveConfig};

use crate::output::{write_manifest, Sink};
use crate::{Cli, Command, SelftestArgs};

pub fn run(cli: &Cli) -> Result<bool> {
    let start = Instant::now();
    let sink = Sink::new(&cli.out, cli.json);
    let seed = cli.seed;
    macro_rules! done {
        ($name:expr, $args:expr) => {{
            write_manifest(&sink, $name, $args, seed, start)?;
            Ok(true)
        }};
    }
    match &cli.command {
        Command::Bessel(BesselCmd::Eval(a)) => {
            bessel_eval(a, &sink)?;
            done!("bessel eval", a)
        }
        Command::Omega(OmegaCmd::Table(a)) => {
            omega_table(a, &sink)?;
            done!("omega table", a)
        }
        Command::Symbol(SymbolCmd::Check(a)) => {
            let passed = symbol_check(a, &sink)?;
            write_manifest(&sink, "symbol check", a, seed, start)?;
            Ok(passed)
        }
        Command::Sobolev(SobolevCmd::Norm(a)) => {
            sobolev_norm_cmd(a, &sink)?;
            done!("sobolev norm", a)
        }
        Command::Decomp(DecompCmd::Caps(a)) => {
            decomp_caps(a, &sink, seed)?;
            done!("decomp caps", a)
        }
        Command::Decomp(DecompCmd::Region(a)) => {
            decomp_region(a, &sink)?;
            done!("decomp region", a)
        }
        Command::Wave(WaveCmd::Solve(a)) => {
            wave_solve(a, &sink, seed)?;
            done!("wave solve", a)
        }
        Command::Wave(WaveCmd::Apriori(a)) => {
            wave_apriori(a, &sink, seed)?;
            done!("wave apriori", a)
        }
        Command::Kernel(KernelCmd::Scan(a)) => {
            kernel_scan(a, &sink)?;
            done!("kernel scan", a)
        }
        Command::Sweep(SweepCmd::Region(a)) => {
            sweep_region(a, &sink, seed)?;
            done!("sweep region", a)
        }
        Command::Selftest(a) => {
            let passed = selftest(a, &sink)?;
            write_manifest(&sink, "selftest", a, seed, start)?;
            Ok(passed)
        }
    }
}

/// `a,b,c` or the inclusive range `start:step:stop`.
fn parse_values(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>()
            .with_context(|| format!("cannot parse range {s:?}"))?;
        let [a, step, b] = parts[..] else { bail!("range {s:?} must read start:step:stop") };
        if !(step > 0.0) || b < a {
            bail!("range {s:?} needs a positive step and start <= stop");
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // rounding to 12 decimals keeps 1.2:0.2:4 on its decimal values
        return Ok((0..=n).map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("cannot parse number {p:?}")))
        .collect()
}

fn parse_usizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().with_context(|| format!("cannot parse count {p:?}")))
        .collect()
}

fn factors_or_ones(factors: &Option<String>, dim: usize) -> Result<Vec<usize>> {
    let f = match factors {
        Some(s) => parse_usizes(s)?,
        None => vec![1; dim],
    };
    if f.iter().sum::<usize>() != dim {
        bail!("factors {f:?} do not sum to dim {dim}");
    }
    Ok(f)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let f = File::open(path).with_context(|| format!("cannot open config {path}"))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("malformed JSON config {path}"))
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl From<Sign> for PhaseSign {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => PhaseSign::Plus,
            Sign::Minus => PhaseSign::Minus,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum BesselCmd {
    /// Prints `re,im` of J_nu(rho), nu = a + ib.
    Eval(BesselArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BesselArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long)]
    rho: f64,
    /// series, asymptotic, recurrence or auto.
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long)]
    terms: Option<usize>,
}

fn bessel_eval(a: &BesselArgs, sink: &Sink) -> Result<()> {
    let method: Method = a.method.parse()?;
    let v = bessel_j::<f64>(BesselOrder::new(a.a, a.b), a.rho, method, a.terms)?;
    if sink.json {
        return sink.value(&serde_json::json!({ "re": v.re, "im": v.im }));
    }
    let mut w = sink.writer()?;
    writeln!(w, "{},{}", v.re, v.im)?;
    Ok(())
}


#[derive(Subcommand, Debug)]
pub enum OmegaCmd {
    /// Radial table of `omega_hat(|xi|) (1+|xi|^2)^{r/2}`.
    Table(OmegaArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OmegaArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    r: f64,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    xi_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
}

fn omega_table(a: &OmegaArgs, sink: &Sink) -> Result<()> {
    if a.samples < 2 || !(a.xi_max > 0.0) {
        bail!("need at least 2 samples and a positive xi-max");
    }
    let alpha = Complex::new(a.alpha, a.alpha_im);
    let rows = (0..a.samples)
        .map(|k| {
            let x = a.xi_max * k as f64 / (a.samples - 1) as f64;
            let v = omega_hat::<f64>(alpha, x, a.dim)? * (1.0 + x * x).powf(a.r / 2.0);
            Ok(vec![x, v.re, v.im])
        })
        .collect::<Result<Vec<_>>>()?;
    sink.table(&["xi", "re", "im"], &rows)
}

#[derive(Subcommand, Debug)]
pub enum SymbolCmd {
    /// Checks one branch of the large-frequency amplitude against its class.
    Check(ConfigArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ConfigArgs {
    #[arg(long)]
    config: String,
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct SymbolConfig {
    factors: Vec<usize>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    l: f64,
    alpha: f64,
    #[serde(default)]
    alpha_im: f64,
    #[serde(default)]
    r: f64,
    s: Vec<f64>,
    #[serde(default = "default_branch")]
    branch: PhaseSign,
    #[serde(default = "default_terms")]
    correction_terms: usize,
    #[serde(default = "default_order")]
    max_order: usize,
    /// Overrides the class the symbol is expected to belong to.
    rho: Option<Vec<f64>>,
}

fn default_branch() -> PhaseSign {
    PhaseSign::Plus
}
fn default_terms() -> usize {
    2
}
fn default_order() -> usize {
    2
}

fn symbol_check(a: &ConfigArgs, sink: &Sink) -> Result<bool> {
    let c: SymbolConfig = read_json(&a.config)?;
    let dim: usize = c.factors.iter().sum();
    let spec = GridSpec::new(dim, &c.factors, c.m, c.l)?;
    let sym = SigmaSymbol::new(OmegaParams::new(Complex::new(c.alpha, c.alpha_im), c.r), &c.s, &c.factors, c.correction_terms)?;
    let cls = match &c.rho {
        Some(rho) => SymbolClass::new(rho.clone()),
        None => sym.class(),
    };
    let report = check_symbol(|xi| sym.eval(xi, c.branch), &spec, &cls, c.max_order)?;
    sink.value(&serde_json::json!({
        "passed": report.passed,
        "class": cls,
        "m": cls.m(),
        "rows": report.rows,
    }))?;
    Ok(report.passed)
}

#[derive(Subcommand, Debug)]
pub enum SobolevCmd {
    /// `||f||_{L^p_s}` of a stored field.
    Norm(SobolevArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SobolevArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    s: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

fn sobolev_norm_cmd(a: &SobolevArgs, sink: &Sink) -> Result<()> {
    let file = File::open(&a.field).with_context(|| format!("cannot open field {}", a.field))?;
    let f: Field<f64> = read_field(BufReader::new(file))?;
    let params = sobolev_params(f.spec().factors(), &parse_values(&a.s)?, a.p)?;
    let v = sobolev_norm(&f, &params)?;
    if sink.json {
        return sink.value(&serde_json::json!({ "norm": v, "s": params.s, "p": params.p }));
    }
    let mut w = sink.writer()?;
    writeln!(w, "{v}")?;
    Ok(())
}

#[derive(Subcommand, Debug)]
pub enum DecompCmd {
    /// Cap count and spacing of the level-j grid on the sphere in R^M.
    Caps(CapsArgs),
    /// Boxes of the region of influence Q_r.
    Region(RegionArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CapsArgs {
    #[arg(long)]
    j: u32,
    /// Ambient dimension M of the sphere S^{M-1}.
    #[arg(long)]
    sphere_dim: usize,
    /// Also measure the partition-of-unity error over 10^4 random directions.
    #[arg(long)]
    check: bool,
}

fn decomp_caps(a: &CapsArgs, sink: &Sink, seed: u64) -> Result<()> {
    let grid = sphere_grid(a.j, a.sphere_dim)?;
    let mut out = serde_json::json!({
        "j": a.j,
        "sphere_dim": a.sphere_dim,
        "count": grid.len(),
        "spacing": grid.spacing_stats(),
    });
    if a.check {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let xi: Vec<f64> = (0..a.sphere_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if xi.iter().all(|&v| v == 0.0) {
                continue;
            }
            let w = cap_partition(&grid, &xi)?;
            worst = worst.max((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs());
        }
        out["partition_max_error"] = serde_json::json!(worst);
    }
    sink.value(&out)
}

#[derive(Args, Debug, Serialize)]
pub struct RegionArgs {
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    dim: usize,
}

fn decomp_region(a: &RegionArgs, sink: &Sink) -> Result<()> {
    let q = influence_region(a.r, a.c, a.dim)?;
    let mut header: Vec<String> = vec!["j".into(), "nu".into()];
    header.extend((1..=a.dim).map(|i| format!("center{i}")));
    header.extend(["slab_half_width".into(), "cap_radius".into()]);
    let rows: Vec<Vec<f64>> = q
        .boxes()
        .iter()
        .map(|b| {
            let mut row = vec![b.j as f64, b.nu as f64];
            row.extend(&b.center);
            row.extend([b.slab_half_width, b.cap_radius]);
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    sink.table(&header, &rows)
}

#[derive(Subcommand, Debug)]
pub enum WaveCmd {
    /// Solves `u_tt - Lap u = g` with zero data and writes `u(T)`.
    Solve(ConfigArgs),
    /// Per-time ratios of the a priori gradient estimate.
    Apriori(ConfigArgs),
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct WaveFile {
    dim: usize,
    factors: Vec<usize>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "T")]
    t: f64,
    steps: usize,
    g: Forcing,
    #[serde(default)]
    s: Vec<f64>,
    #[serde(default = "default_p")]
    p: f64,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Forcing {
    /// Forcing of `sin(2 pi k.x) sin^2(omega t)`.
    Manufactured { k: Vec<f64>, omega: f64 },
    /// `sum amplitude cos(2 pi k.x) cos(2 pi beta t)`.
    Modes { modes: Vec<Mode> },
    /// A stored field, constant in time.
    File { path: String },
    /// Random band-limited field times `1 + 0.5 sin(2 pi beta t)`.
    Random { band: f64 },
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct Mode {
    k: Vec<f64>,
    amplitude: f64,
    #[serde(default)]
    beta: f64,
}

fn wave_setup(c: &WaveFile, seed: u64) -> Result<(WaveConfig, Vec<Field<f64>>)> {
    if c.factors.iter().sum::<usize>() != c.dim {
        bail!("factors {:?} do not sum to dim {}", c.factors, c.dim);
    }
    let spec = GridSpec::new(c.dim, &c.factors, c.m, c.l)?;
    let config = WaveConfig::new(spec.clone(), c.t, c.steps)?;
    let g = match &c.g {
        Forcing::Manufactured { k, omega } => {
            check_len(k.len(), c.dim)?;
            Manufactured { k: k.clone(), omega: *omega }.sample_g(&config)
        }
        Forcing::Modes { modes } => {
            for m in modes {
                check_len(m.k.len(), c.dim)?;
            }
            sample_slices(&config, |x, t| {
                modes
                    .iter()
                    .map(|m| {
                        let kx: f64 = m.k.iter().zip(x).map(|(a, b)| a * b).sum();
                        m.amplitude * (2.0 * PI * kx).cos() * (2.0 * PI * m.beta * t).cos()
                    })
                    .sum()
            })
        }
        Forcing::File { path } => {
            let file = File::open(path).with_context(|| format!("cannot open forcing {path}"))?;
            let f: Field<f64> = read_field(BufReader::new(file))?;
            if f.spec() != &spec {
                bail!("forcing field grid does not match the config grid");
            }
            vec![f; c.steps + 1]
        }
        Forcing::Random { band } => random_forcing(&config, *band, seed)?,
    };
    Ok((config, g))
}

fn check_len(got: usize, dim: usize) -> Result<()> {
    if got != dim {
        bail!("wave vector has {got} components in R^{dim}");
    }
    Ok(())
}

fn wave_solve(a: &ConfigArgs, sink: &Sink, seed: u64) -> Result<()> {
    let c: WaveFile = read_json(&a.config)?;
    let (config, g) = wave_setup(&c, seed)?;
    let u = solve_wave(&g, &config)?;
    let last = u.last().ok_or_else(|| anyhow!("solver returned no time levels"))?;
    let error = match &c.g {
        Forcing::Manufactured { k, omega } => {
            Some(manufactured_error(&Manufactured { k: k.clone(), omega: *omega }, &config)?)
        }
        _ => None,
    };
    if sink.json {
        return sink.value(&serde_json::json!({
            "t_final": config.t_final,
            "steps": config.steps,
            "l2_norm_final": last.l2_norm(),
            "manufactured_error": error,
        }));
    }
    if let Some(e) = error {
        eprintln!("relative space-time L2 error against the manufactured solution: {e:e}");
    }
    let w = sink.writer()?;
    write_field(last, w)?;
    Ok(())
}

fn wave_apriori(a: &ConfigArgs, sink: &Sink, seed: u64) -> Result<()> {
    let c: WaveFile = read_json(&a.config)?;
    let (config, g) = wave_setup(&c, seed)?;
    let s = if c.s.is_empty() { vec![0.0; c.factors.len()] } else { c.s.clone() };
    let params = sobolev_params(&c.factors, &s, c.p)?;
    let rows = apriori_check(&g, &params, &config)?;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.t, r.lhs, r.rhs, r.ratio]).collect();
    sink.table(&["t", "lhs", "rhs", "ratio"], &table)
}

#[derive(Subcommand, Debug)]
pub enum KernelCmd {
    /// L1, difference or tail masses of the localized kernels.
    Scan(ScanArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    L1,
    Diff,
    Tail,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    mode: ScanKind,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Block sizes, comma separated (default: all ones).
    #[arg(long)]
    factors: Option<String>,
    #[arg(long, default_value_t = 5)]
    j_min: u32,
    #[arg(long, default_value_t = 6)]
    j_max: u32,
    /// Class exponents of the model symbol, one per block.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long, default_value_t = 1.5)]
    half_width: f64,
    /// Largest cone index; default floor(j/2) - 1.
    #[arg(long)]
    t_max: Option<u32>,
    /// Radius of the region of influence (tail mode).
    #[arg(long, default_value_t = 0.125)]
    r: f64,
    /// Region constant (tail mode).
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = Sign::Plus)]
    sign: Sign,
}

fn cone_indices(j: u32, blocks: usize, t_max: Option<u32>) -> Vec<Vec<u32>> {
    match t_max {
        None => cone_indices_first(j, blocks),
        Some(cap) => {
            let mut out = vec![vec![]];
            for _ in 0..blocks {
                out = out
                    .into_iter()
                    .flat_map(|p: Vec<u32>| {
                        (0..=cap).map(move |v| {
                            let mut q = p.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

fn kernel_scan(a: &ScanArgs, sink: &Sink) -> Result<()> {
    let factors = factors_or_ones(&a.factors, a.dim)?;
    if factors.len() < 2 {
        bail!("kernel scans need at least two factor blocks");
    }
    if a.j_min > a.j_max {
        bail!("j-min {} exceeds j-max {}", a.j_min, a.j_max);
    }
    let rho = match &a.rho {
        Some(s) => parse_values(s)?,
        None => vec![0.26; factors.len()],
    };
    if rho.len() != factors.len() {
        bail!("{} class exponents for {} blocks", rho.len(), factors.len());
    }
    let mut setup = KernelSetup::new(&factors, a.half_width, KernelSymbol::product(&rho));
    setup.sign = a.sign.into();
    let blocks = factors.len() - 1;
    let jobs: Vec<(u32, Vec<Vec<u32>>)> = (a.j_min..=a.j_max).map(|j| (j, cone_indices(j, blocks, a.t_max))).collect();
    let rows: Vec<KernelScanRow> = match a.mode {
        ScanKind::L1 => l1_scan(&setup, &jobs)?,
        ScanKind::Diff => {
            let mut rows = Vec::new();
            for (j, ts) in &jobs {
                for t in ts {
                    rows.extend(diff_scan(&setup, *j, t, &diff_shifts(*j, a.dim))?);
                }
            }
            rows
        }
        ScanKind::Tail => {
            let ys = vec![vec![0.0; a.dim], {
                let mut y = vec![0.0; a.dim];
                y[0] = a.r / 2.0;
                y
            }];
            tail_scan_many(&setup, &jobs, a.r, a.c, &ys)?
        }
    };
    let mut header: Vec<String> = vec!["j".into()];
    header.extend((2..=factors.len()).map(|i| format!("t{i}")));
    header.extend(["measured".into(), "predicted".into(), "ratio".into(), "y_norm".into(), "l1_mass".into()]);
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.j as f64];
            row.extend(r.t.iter().map(|&t| t as f64));
            let yn = r.y.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.extend([r.measured, r.predicted, r.ratio, yn, r.l1_mass]);
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    sink.table(&header, &table)
}

#[derive(Subcommand, Debug)]
pub enum SweepCmd {
    /// `max ||f * Omega^alpha||_{L^p_r} / ||f||_{L^p_s}` over a test family.
    Region(SweepArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    factors: Option<String>,
    /// Values or start:step:stop.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    r: String,
    /// Sobolev vectors separated by `;`, entries by `,` (default: zero).
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value = "2")]
    p: String,
    /// atoms, knapp or random.
    #[arg(long, default_value = "random")]
    family: String,
    #[arg(long = "M", default_value_t = 64)]
    m: usize,
    #[arg(long = "L", default_value_t = 2.0)]
    l: f64,
    #[arg(long, default_value_t = 20)]
    random: usize,
    #[arg(long, default_value_t = 6)]
    knapp_levels: usize,
    #[arg(long, default_value_t = 4)]
    atom_radii: usize,
}

fn sweep_region(a: &SweepArgs, sink: &Sink, seed: u64) -> Result<()> {
    let factors = factors_or_ones(&a.factors, a.dim)?;
    let spec = GridSpec::new(a.dim, &factors, a.m, a.l)?;
    let family: Family = a.family.parse()?;
    let ss: Vec<Vec<f64>> = match &a.s {
        None => vec![vec![0.0; factors.len()]],
        Some(s) => s.split(';').map(parse_values).collect::<Result<_>>()?,
    };
    for s in &ss {
        if s.len() != factors.len() {
            bail!("Sobolev vector {s:?} has {} entries for {} blocks", s.len(), factors.len());
        }
    }
    let sizes = FamilySizes { random: a.random, knapp_levels: a.knapp_levels, atom_radii: a.atom_radii };
    let rows = region_sweep(
        &parse_values(&a.alpha)?,
        &parse_values(&a.r)?,
        &ss,
        &parse_values(&a.p)?,
        family,
        &spec,
        &sizes,
        seed,
    )?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.alpha,
                r.r,
                r.s_total,
                r.p,
                r.ratio_max,
                r.inside_theory as u8 as f64,
                r.knapp_slope.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    sink.table(&["alpha", "r", "s_total", "p", "ratio_max", "inside_theory", "knapp_slope"], &table)
}

fn selftest(a: &SelftestArgs, sink: &Sink) -> Result<bool> {
    // plain output to stdout streams; otherwise progress goes to stderr
    let live = sink.path().is_none() && !sink.json;
    let mut lines = Vec::new();
    let mut report = |r: &spherewave_core::acceptance::CriterionResult| {
        let line = format_line(r);
        if live {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        lines.push(line);
    };
    let results = if a.only.is_empty() {
        run_all(&mut report)
    } else {
        a.only
            .iter()
            .map(|&id| {
                let r = run_one(id);
                report(&r);
                r
            })
            .collect()
    };
    if sink.json {
        sink.value(&results)?;
    } else if !live {
        let mut w = sink.writer()?;
        for line in &lines {
            writeln!(w, "{line}")?;
        }
    }
    Ok(results.iter().all(|r| r.passed))
}
