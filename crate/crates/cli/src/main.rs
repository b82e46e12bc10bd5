//! `ntw`: command-line driver for the number-theory workbench.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ntw_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Core(e) => match e {
                Error::InvalidArgument(_) | Error::Hypothesis(_) | Error::NotSquarefree(_) => 2,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ntw",
    version,
    about = "Exponential sums, modular coefficients and summation-formula experiments"
)]
pub struct Cli {
    /// Worker threads; 1 keeps every reduction in a single fixed order.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Directory of coefficient caches; tables are taken from here instead of being expanded.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Directory receiving the report, CSV tables and SVG plots.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one of the exact verification suites.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Ramanujan sums: divisor formula against brute force.
    #[command(args_override_self = true)]
    VerifyRamanujan(RamanujanArgs),
    /// Kloosterman sums: CRT factorization and Weil margins.
    #[command(args_override_self = true)]
    VerifyKloosterman(KloostermanArgs),
    /// Expand a catalog form and write its cache file.
    #[command(args_override_self = true)]
    BuildCache(BuildArgs),
    /// Build, load or verify a coefficient cache.
    #[command(args_override_self = true)]
    Cache(CacheArgs),
    /// Additively twisted sum against its dual Bessel expansion.
    #[command(args_override_self = true)]
    Voronoi(VoronoiArgs),
    /// Calibrate and test the delta-symbol expansion.
    #[command(args_override_self = true)]
    DeltaMethod(DeltaArgs),
    /// One shifted convolution sum.
    #[command(args_override_self = true)]
    Scs(ScsArgs),
    /// Shifted convolution sums over a dyadic range with slope fit.
    #[command(args_override_self = true)]
    ScsScaling(ScsScalingArgs),
    /// Amplified sum against the plain Rankin-Selberg sum.
    #[command(args_override_self = true)]
    Amplify(AmplifyArgs),
    /// Direct amplified sum against its congruence-averaged form.
    #[command(args_override_self = true)]
    CircleCheck(CircleArgs),
    /// Coefficient sums constrained to an arithmetic progression.
    #[command(args_override_self = true)]
    ApSum(ApArgs),
    /// Smooth Rankin-Selberg sums across a dyadic range around the conductor root.
    #[command(args_override_self = true)]
    Pv(PvArgs),
    /// Central-line value of L(f x g, s).
    #[command(args_override_self = true)]
    Lvalue(LvalueArgs),
}

pub const COMMANDS: [&str; 14] = [
    "verify",
    "verify-ramanujan",
    "verify-kloosterman",
    "build-cache",
    "cache",
    "voronoi",
    "delta-method",
    "scs",
    "scs-scaling",
    "amplify",
    "circle-check",
    "ap-sum",
    "pv",
    "lvalue",
];

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Ramanujan,
    Kloosterman,
    Coefficients,
    Hecke,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: Suite,
    #[arg(long, default_value_t = 300)]
    pub qmax: u64,
    #[arg(long, default_value_t = 300)]
    pub nmax: i64,
    #[arg(long, default_value_t = 50)]
    pub pairs: usize,
    #[arg(long, default_value_t = 100)]
    pub cmax: u64,
    #[arg(long, default_value_t = 1000)]
    pub weil_cmax: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Coefficient range for the coefficients and hecke suites.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct RamanujanArgs {
    #[arg(long, default_value_t = 300)]
    pub qmax: u64,
    #[arg(long, default_value_t = 300)]
    pub nmax: i64,
}

#[derive(Args, Debug)]
pub struct KloostermanArgs {
    #[arg(long, default_value_t = 50)]
    pub pairs: usize,
    #[arg(long, default_value_t = 100)]
    pub cmax: u64,
    #[arg(long, default_value_t = 1000)]
    pub weil_cmax: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub form: String,
    #[arg(long)]
    pub n: usize,
    /// Primes up to this bound are cross-checked against point counts.
    #[arg(long)]
    pub cross_check: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CacheAction {
    Build,
    Load,
    Verify,
}

#[derive(Args, Debug)]
pub struct CacheArgs {
    pub action: CacheAction,
    #[arg(long)]
    pub form: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Cache file for load and verify; defaults to the standard name inside --cache-dir.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub cross_check: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SignArg {
    Minus,
    Plus,
}

#[derive(Args, Debug)]
pub struct VoronoiArgs {
    #[arg(long, default_value = "delta")]
    pub form: String,
    #[arg(long)]
    pub a: i64,
    #[arg(long)]
    pub c: u64,
    /// Support of the bump test function.
    #[arg(long, default_value_t = 50.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 200.0)]
    pub hi: f64,
    #[arg(long, value_enum, default_value = "minus")]
    pub sign: SignArg,
    #[arg(long, default_value_t = 1e-7)]
    pub rel_budget: f64,
    /// Pass threshold on the relative error; 1e-6 at level 1, 1e-5 otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long, default_value_t = 20)]
    pub q: u64,
    /// Skip the quadrature-based kernel checks.
    #[arg(long, default_value_t = false)]
    pub no_kernel: bool,
}

#[derive(Args, Debug)]
pub struct ScsArgs {
    #[arg(long, default_value = "delta,delta")]
    pub pair: String,
    #[arg(long, default_value_t = 1)]
    pub a: i64,
    #[arg(long, default_value_t = 1)]
    pub b: i64,
    #[arg(long, default_value_t = 0)]
    pub c: i64,
    #[arg(long, default_value_t = 1)]
    pub d: i64,
    #[arg(long)]
    pub m1: f64,
    #[arg(long)]
    pub m2: Option<f64>,
    /// rankin, nonzero-shift or level-multiple; chosen from the shift when absent.
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Args, Debug)]
pub struct ScsScalingArgs {
    #[arg(long, default_value = "delta,delta")]
    pub pair: String,
    /// Shorthand for a = b = 1, c = 0, d = shift.
    #[arg(long)]
    pub shift: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub a: i64,
    #[arg(long, default_value_t = 1)]
    pub b: i64,
    #[arg(long, default_value_t = 0)]
    pub c: i64,
    #[arg(long, default_value_t = 1)]
    pub d: i64,
    #[arg(long, default_value_t = 256)]
    pub mmin: u64,
    #[arg(long, default_value_t = 16384)]
    pub mmax: u64,
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Args, Debug)]
pub struct AmplifyArgs {
    #[arg(long, default_value = "level5,level11")]
    pub pair: String,
    /// Defaults to pq.
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "10,16,24,32,40")]
    pub lengths: Vec<u64>,
}

#[derive(Args, Debug)]
pub struct CircleArgs {
    #[arg(long, default_value = "level5,level11")]
    pub pair: String,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub length: u64,
    /// Moduli scale; defaults to 10 L^2.
    #[arg(long)]
    pub moduli_scale: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ApArgs {
    #[arg(long, default_value = "level5,level11")]
    pub pair: String,
    #[arg(long, default_value_t = 500.0)]
    pub x: f64,
    #[arg(long, default_value_t = 500.0)]
    pub y: f64,
    #[arg(long, default_value_t = 1)]
    pub a: u64,
    #[arg(long, default_value_t = 1)]
    pub b: u64,
    /// Single modulus; without it every c in 2..=cmax coprime to ab is swept.
    #[arg(long)]
    pub c: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub cmax: u64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
}

#[derive(Args, Debug)]
pub struct PvArgs {
    #[arg(long, default_value = "level5,level11")]
    pub pair: String,
}

#[derive(Args, Debug)]
pub struct LvalueArgs {
    #[arg(long, default_value = "level5,level11")]
    pub pair: String,
    /// Imaginary part of s; the real part is fixed at 1/2.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Coefficients used; defaults to 60 pq.
    #[arg(long)]
    pub x_cut: Option<usize>,
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect(), &COMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads == 0 {
        eprintln!("usage error: --threads must be positive");
        return ExitCode::from(2);
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    match commands::run(&cli) {
        Ok(report) => {
            print!("{}", report.render());
            if let Some(dir) = &cli.out {
                if let Err(e) = report.write_to(dir) {
                    eprintln!("data error: writing {}: {e}", dir.display());
                    return ExitCode::from(3);
                }
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
