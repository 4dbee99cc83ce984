use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use splab::scalar::parse_rational;
use splab::Scalar;

#[derive(Parser, Debug)]
#[command(name = "splab", version, about = "Random series-parallel networks: growth, exact laws, limits")]
pub struct Cli {
    /// Worker threads (default: all cores); SPLAB_THREADS takes precedence.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grow one network and print it.
    Grow(GrowArgs),
    /// Exact laws and expectations.
    #[command(subcommand)]
    Exact(ExactCommand),
    /// Enumerate all histories of a small size.
    Oracle(OracleArgs),
    /// Run a batch of independent growths.
    Simulate(SimulateArgs),
    /// Check simulation results or an oracle table against exact results.
    Validate(ValidateArgs),
    /// Limit-law moments and densities.
    Limits(LimitsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Bernoulli,
    Binary,
}

/// A probability given as `a/b` (routed to exact arithmetic where supported)
/// or as a decimal.
#[derive(Clone, Debug, PartialEq)]
pub struct PArg {
    pub text: String,
    pub value: f64,
    /// Present for the `a/b` form.
    pub exact: Option<BigRational>,
}

impl PArg {
    /// The exact value of either form; decimals are read digit for digit.
    pub fn rational(&self) -> Option<BigRational> {
        self.exact.clone().or_else(|| parse_rational(&self.text))
    }
}

impl FromStr for PArg {
    type Err = String;

    fn from_str(s: &str) -> Result<PArg, String> {
        let text = s.trim().to_string();
        let (value, exact) = if text.contains('/') {
            let q = parse_rational(&text).ok_or_else(|| format!("not a fraction: {s:?}"))?;
            (Scalar::to_f64(&q), Some(q))
        } else {
            (text.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?, None)
        };
        if !(value > 0.0 && value < 1.0) {
            return Err(format!("p must lie strictly between 0 and 1, got {s}"));
        }
        Ok(PArg { text, value, exact })
    }
}

impl fmt::Display for PArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Args, Debug)]
pub struct ModelOpts {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Parallel-doubling probability, required for the Bernoulli model.
    #[arg(long)]
    pub p: Option<PArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowFormat {
    Json,
    Dot,
    Csv,
}

#[derive(Args, Debug)]
pub struct GrowArgs {
    #[command(flatten)]
    pub model: ModelOpts,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, value_enum, default_value_t = GrowFormat::Json)]
    pub format: GrowFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BernoulliQuantity {
    Degree,
    Length,
    Paths,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BernoulliMethod {
    /// Stable recurrence (laws) or the expectation recurrence (paths).
    Dp,
    /// Alternating closed form in multiprecision, or exact for `a/b` input.
    Closed,
    /// The expectation recurrence for paths.
    Series,
    /// Main term and correction of the path-count asymptotics.
    Asymptotic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryQuantity {
    Length,
    #[value(alias = "degree")]
    Sinkdeg,
    Paths,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryMethod {
    /// Laws from generating-function coefficients.
    Series,
    /// Closed-form means.
    Closed,
    /// Expectation tables for paths.
    Tables,
    /// Asymptotic means.
    Asymptotic,
}

#[derive(Subcommand, Debug)]
pub enum ExactCommand {
    Bernoulli(ExactBernoulliArgs),
    Binary(ExactBinaryArgs),
}

#[derive(Args, Debug)]
pub struct ExactBernoulliArgs {
    #[arg(long, value_enum)]
    pub quantity: BernoulliQuantity,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: PArg,
    #[arg(long, value_enum, default_value_t = BernoulliMethod::Dp)]
    pub method: BernoulliMethod,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExactBinaryArgs {
    #[arg(long, value_enum, required_unless_present = "estimate_rho")]
    pub quantity: Option<BinaryQuantity>,
    #[arg(long, required_unless_present = "estimate_rho")]
    pub n: Option<usize>,
    /// Estimate the path-count singularity instead of printing a quantity.
    #[arg(long, conflicts_with_all = ["quantity", "n"])]
    pub estimate_rho: bool,
    /// Number of coefficients used by `--estimate-rho` and the asymptotic method.
    #[arg(long, default_value_t = 1000)]
    pub nmax: usize,
    /// Defaults to `series` for laws and `tables` for paths.
    #[arg(long, value_enum)]
    pub method: Option<BinaryMethod>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    /// Exact p as a fraction, e.g. 1/2.
    #[arg(long, conflicts_with_all = ["p_num", "p_den"])]
    pub p: Option<PArg>,
    #[arg(long, requires = "p_den")]
    pub p_num: Option<i64>,
    #[arg(long, requires = "p_num")]
    pub p_den: Option<i64>,
    /// Raise the enumeration cap to this size.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelOpts,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated subset of deg, len, rlen, paths.
    #[arg(long, default_value = "deg,len")]
    pub quantities: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Against {
    Dp,
    Closed,
    Oracle,
    Limit,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub against: Against,
    /// A `simulate` result (dp, closed, limit) or an `oracle` table (oracle).
    #[arg(long)]
    pub input: PathBuf,
    /// Significance level of the chi-square tests.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Relative tolerance for limit-moment comparisons.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Ml,
    BinaryLength,
    BinaryDegree,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub p: Option<f64>,
    /// Density argument (Mittag-Leffler only).
    #[arg(long, conflicts_with = "r", required_unless_present = "r")]
    pub x: Option<f64>,
    /// Moment order.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}
