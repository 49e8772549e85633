mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "spherewave", version, about = "Sphere-singular multipliers, dyadic decompositions and wave probes")]
pub struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true, env = "SPHEREWAVE_THREADS")]
    threads: Option<usize>,

    /// Output path; `-` is standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,

    /// Machine-readable JSON instead of CSV or plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complex-order Bessel functions.
    #[command(subcommand)]
    Bessel(commands::BesselCmd),
    /// Fourier transform of the Omega kernels.
    #[command(subcommand)]
    Omega(commands::OmegaCmd),
    /// Symbol-class checks by finite differences.
    #[command(subcommand)]
    Symbol(commands::SymbolCmd),
    /// Multi-parameter Sobolev norms.
    #[command(subcommand)]
    Sobolev(commands::SobolevCmd),
    /// Sphere caps and regions of influence.
    #[command(subcommand)]
    Decomp(commands::DecompCmd),
    /// Spectral Duhamel wave solver.
    #[command(subcommand)]
    Wave(commands::WaveCmd),
    /// Localized kernel scans.
    #[command(subcommand)]
    Kernel(commands::KernelCmd),
    /// Operator-norm sweeps over parameters.
    #[command(subcommand)]
    Sweep(commands::SweepCmd),
    /// Runs the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SelftestArgs {
    /// Run only these criteria (1-13), comma separated.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: cannot configure {k} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // reader went away (e.g. `| head`); not an error of ours
        Err(e)
            if e.chain().any(|c| {
                let io = match c.downcast_ref::<spherewave_core::Error>() {
                    Some(spherewave_core::Error::Io(io)) => Some(io),
                    _ => c.downcast_ref::<std::io::Error>(),
                };
                io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
