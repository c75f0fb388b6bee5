use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "apvar", version, about = "Numerical experiments on variances in arithmetic progressions")]
pub struct Cli {
    /// Directory for the CSV and JSON reports
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Table cache directory (falls back to $APVAR_CACHE_DIR)
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Do not echo the CSV to stdout
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build τ, φ, μ and Δ coefficient tables and write them to the cache
    Sieve {
        #[arg(long)]
        n_max: usize,
    },
    /// Both sides of the Voronoi formula for one (q, h)
    Voronoi(VoronoiArgs),
    /// Mellin, Bessel, Parseval and Mellin-Barnes identity suites
    MellinCheck {
        /// Run only these suites
        #[arg(long, value_delimiter = ',', value_parser = ["mellin-kernel", "omega", "parseval", "mellin-barnes"])]
        suite: Vec<String>,
    },
    /// Exact variance against prediction and error budget
    Variance(VarianceArgs),
    /// Off-diagonal terms, decomposition check and fake main terms
    ShiftedCheck(ShiftedArgs),
    /// Variance reports over a geometric grid of moduli
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct VoronoiArgs {
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub h: i64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub big_h: f64,
    /// Relative tolerance on |lhs - rhs|
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub x: f64,
    /// Single modulus
    #[arg(long, conflicts_with = "q_range")]
    pub q: Option<u64>,
    /// Inclusive modulus range LO:HI
    #[arg(long)]
    pub q_range: Option<String>,
    /// Use this many geometric points over --q-range instead of every integer
    #[arg(long, requires = "q_range")]
    pub geometric: Option<usize>,
    /// Rankin-Selberg constant for the cusp prediction (default: fitted)
    #[arg(long)]
    pub c_hat: Option<f64>,
    /// Smoothing length for the divisor prediction (default: q-dependent formula, clamped to [X^0.6, X/4])
    #[arg(long)]
    pub big_h: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ShiftedArgs {
    /// cusp-j, div-yy, div-kk, div-yk (off-diagonal) or fake-yy, fake-kk, fake-yk
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub q: u64,
    /// Smoothing length (default: q-dependent formula, clamped to [X^0.6, X/4])
    #[arg(long)]
    pub big_h: Option<f64>,
    /// Relative tolerance of the decomposition check
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Truncation of the Λ series (fake main terms)
    #[arg(long, default_value_t = apvar_core::shifted::DEFAULT_K)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "cusp")]
    pub seq: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub q_min: u64,
    #[arg(long)]
    pub q_max: u64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long)]
    pub c_hat: Option<f64>,
}
