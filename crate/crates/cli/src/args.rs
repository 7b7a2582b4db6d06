use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gconvex",
    version,
    about = "Chebyshev systems, generalized divided differences and ω-n-convexity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a system as positive, negative or not Chebyshev on a grid.
    Classify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Generalized divided difference [x₁,…,x_n; f] of a target function.
    Dd {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        target: TargetArgs,
        /// Comma-separated points, as many as the system order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        points: Vec<f64>,
        /// Use the order-recursive tableau (points must be increasing).
        #[arg(long)]
        fast: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Certify ω-n-convexity of a target function on a grid.
    Certify {
        #[arg(long, value_enum, default_value_t = MethodArg::TheoremA)]
        method: MethodArg,
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// The n − 1 fixed knots of the monotonicity scan.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        knots: Vec<f64>,
        /// The n interpolation nodes of the definition check.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        nodes: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the support combination through n − 1 knots and check its sign pattern.
    Support {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        knots: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the cubic support example (system 1, x, x²; f = x³; knots 0, 1) and self-check.
    ReproducePaperExample {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "theoremA")]
    TheoremA,
    #[value(name = "corollary1")]
    Corollary1,
    #[value(name = "theorem2")]
    Theorem2,
    #[value(name = "definition")]
    Definition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
    Columns,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// `poly:N`, `exp:a,b,…` or the path of a system definition file.
    #[arg(long)]
    pub system: String,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Expression (`monomial:k`, `negmonomial:k`, `exp:a`, `cos`, `sin`,
    /// `const:c`, `poly:c0,c1,…`) or `table:PATH`.
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: String,
    /// Interpolate tables linearly between rows.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Uniform grid `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid_file")]
    pub grid: Option<String>,
    /// Take the grid from the first column of a table file.
    #[arg(long)]
    pub grid_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    /// Tuple enumeration budget before switching to sampling.
    #[arg(long, default_value_t = 50_000)]
    pub budget: usize,
    #[arg(long, env = "GCONVEX_SEED", default_value_t = gconvex_core::tuples::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
