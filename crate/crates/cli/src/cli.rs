use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "confcalc", version, about = "Conformable fractional calculus checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalOpts {
    /// Write the report here; `.csv` selects CSV, anything else JSON.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the pass tolerance of the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Quadrature panels per axis.
    #[arg(long, global = true, default_value_t = 8)]
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, global = true, default_value_t = 10)]
    pub order: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Recorded verbatim in the manifest; omitted runs stay reproducible.
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbolic conformable partial derivative and its value at a point.
    Deriv(DerivArgs),
    /// Residual of a calculus identity.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Hardy-type and uncertainty inequalities over a suite of functions.
    Hardy(HardyArgs),
    /// Estimate the best constant by quotient minimization.
    Constant(ConstantArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DerivArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
    /// Axis k of D^α_{x_k}.
    #[arg(long, default_value_t = 1)]
    pub var: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Evaluation point `x1,x2,...`; defaults to all ones.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Pointwise Picone identity R = L with L ≥ 0.
    Picone(PiconeArgs),
    /// Green's first identity on a box.
    Green1(GreenArgs),
    /// Green's second identity on a box.
    Green2(GreenArgs),
    /// Divergence identity for a vector field on a box.
    Divergence(DivergenceArgs),
    /// One-dimensional integration by parts.
    Parts(PartsArgs),
    /// Fundamental theorem of conformable calculus.
    Ftc(FtcArgs),
    /// Equality of mixed conformable partials.
    Clairaut(ClairautArgs),
    /// Chain rule for f(v(x)).
    Chain(ChainArgs),
    /// Compare T^{α+β} with T^α T^β.
    Compose(ComposeArgs),
    /// Vanishing flux of an α-harmonic function.
    Gauss(GaussArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PiconeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// One exponent for every axis, or one per axis.
    #[arg(long, default_value = "2")]
    pub p: String,
    /// Single evaluation point; otherwise `--points` seeded points in [0.5, 3]^n.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "box")]
    pub domain: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DivergenceArgs {
    /// Field components, one flag per axis.
    #[arg(long = "f", required = true, allow_hyphen_values = true)]
    pub field: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "box")]
    pub domain: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PartsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Interval `a:b`.
    #[arg(long = "box")]
    pub domain: String,
}

#[derive(Debug, Args, Serialize)]
pub struct FtcArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ClairautArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    /// Outer function of one variable, written in x1.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    /// Inner function of x1..xn.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    #[arg(long, default_value_t = 1)]
    pub var: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ComposeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub at: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GaussArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "box")]
    pub domain: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Theorem {
    #[value(name = "3.2")]
    #[serde(rename = "3.2")]
    General,
    #[value(name = "3.3")]
    #[serde(rename = "3.3")]
    Power,
    #[value(name = "3.4")]
    #[serde(rename = "3.4")]
    PowerM0,
    #[value(name = "3.5")]
    #[serde(rename = "3.5")]
    PowerMAlpha,
    #[value(name = "3.6")]
    #[serde(rename = "3.6")]
    Exponential,
    #[value(name = "3.7")]
    #[serde(rename = "3.7")]
    Isotropic,
    #[value(name = "hpw")]
    #[serde(rename = "hpw")]
    Hpw,
    #[value(name = "hpw-aniso")]
    #[serde(rename = "hpw-aniso")]
    HpwAniso,
}

#[derive(Debug, Args, Serialize)]
pub struct HardyArgs {
    pub theorem: Theorem,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value = "2")]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Box `a:b,c:d,...`; a single interval is repeated over all axes.
    #[arg(long = "box")]
    pub domain: String,
    /// Number of seeded test functions.
    #[arg(long, default_value_t = 50)]
    pub suite: usize,
    /// Test functions positive on the boundary, exercising the boundary term.
    #[arg(long)]
    pub shifted: bool,
    /// Check a single function instead of a suite.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Auxiliary function for 3.2.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Weights W_k for 3.2, one flag per axis.
    #[arg(long = "w", allow_hyphen_values = true)]
    pub w: Vec<String>,
    /// Weights H_k for 3.2, one flag per axis.
    #[arg(long = "h", allow_hyphen_values = true)]
    pub h: Vec<String>,
    /// Constants L_k for 3.2, comma separated.
    #[arg(long = "l", allow_hyphen_values = true)]
    pub l: Option<String>,
    /// Report margins without enforcing the subsolution certificate.
    #[arg(long)]
    pub uncertified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ConstantTheorem {
    #[value(name = "3.3")]
    #[serde(rename = "3.3")]
    Power,
    #[value(name = "3.6")]
    #[serde(rename = "3.6")]
    Exponential,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantArgs {
    pub theorem: ConstantTheorem,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long = "box")]
    pub domain: String,
    /// Family dimension.
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    /// Parameter bounds `lo:hi`, containing 0.
    #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
    pub bounds: String,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_evals: usize,
}
