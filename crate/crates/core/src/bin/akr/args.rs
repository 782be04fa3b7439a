use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "akr", version, about = "Bernstein and AKR operators: evaluation, error tables, class tests and bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List AKR nodes beside the uniform Bernstein nodes
    Nodes(NodesArgs),
    /// Evaluate an operator image at given points
    Eval(EvalArgs),
    /// Measure the error of an operator on a grid
    Error(ErrorArgs),
    /// Reproduce the error table of a worked example
    Table(TableArgs),
    /// Check the pointwise inequality chain between f, the AKR and the Bernstein operator
    Chain(ChainArgs),
    /// Test membership in a function class
    Classify(ClassifyArgs),
    /// Probe the limit of n (Op_n f - f) at a point
    Voronovskaja(VorArgs),
    /// Sample f and its operator images on a grid for plotting
    Figure(FigureArgs),
    /// Compare closed-form error bounds with the measured error
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Choice {
    /// Expression in x (and y), e.g. "exp(x^2*y^2) - 1"
    #[arg(long = "f", value_name = "EXPR")]
    pub expr: Option<String>,
    /// Built-in function: ex3.1, ex3.2, ex3.4, ex4.3, ex4.4, ex4.5, ex4.6
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
}

#[derive(Debug, Args)]
pub struct Source {
    #[command(flatten)]
    pub choice: Choice,
    /// Use finite differences instead of exact derivative channels
    #[arg(long)]
    pub fd: bool,
    /// Treat an expression as a function of (x, y) even if y does not occur
    #[arg(long, value_name = "1|2")]
    pub dim: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Bernstein,
    Akr,
}

#[derive(Debug, Args)]
pub struct NodesArgs {
    #[arg(long)]
    pub n: usize,
    /// Second degree; lists the product nodes
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Op::Akr)]
    pub op: Op,
    #[arg(long)]
    pub n: usize,
    /// Second degree, for bivariate functions (defaults to n)
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    /// Comma-separated x coordinates
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Comma-separated y coordinates, paired with x
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    Sup,
    Rel2,
}

#[derive(Debug, Args)]
pub struct ErrorArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Op::Akr)]
    pub op: Op,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    /// Grid points per axis [default: 1001 in one variable, 201 in two]
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum, default_value_t = Norm::Sup)]
    pub norm: Norm,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    #[value(name = "3.1")]
    Univariate,
    #[value(name = "4.4")]
    Bivariate,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub example: Example,
    /// Comma-separated degrees [default: the degrees of the printed table]
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<usize>,
    /// Use a 101x101 grid for degrees above 40 (bivariate table only)
    #[arg(long)]
    pub speed_grid: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Chain {
    /// f <= B_{n,j} f <= B_n f
    Below,
    /// B_{n,j} f >= B_n f >= f
    Above,
    /// f <= B_{n,m,j} f <= B_{n,m} f
    Bivariate,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    /// Chain to check [default: below in one variable, bivariate in two]
    #[arg(long, value_enum)]
    pub kind: Option<Chain>,
    /// Grid points per axis [default: 1001 in one variable, 201 in two]
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Class {
    /// f' >= 0 and x f'' - (j-1) f' >= 0
    Kj1,
    /// The kj1 conditions on every axis slice
    Kj2,
    /// f' <= 0 and f'' >= 0
    DecreasingConvex,
    /// Non-negative determinants against the Haar pair (--f0, --f1)
    Haar,
    /// x^(j-1) phi_y = y^(j-1) psi_x, with phi from --f/--catalog and psi from --psi
    Compatibility,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum)]
    pub class: Class,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    /// Grid points per axis [default: 501 in one variable, 101 in two]
    #[arg(long)]
    pub points: Option<usize>,
    /// Margin tolerance [default: 1e-9 for exact derivatives, 1e-6 for finite differences]
    #[arg(long)]
    pub tol: Option<f64>,
    /// First function of the Haar pair
    #[arg(long, default_value = "1")]
    pub f0: String,
    /// Second function of the Haar pair [default: x^j]
    #[arg(long)]
    pub f1: Option<String>,
    /// Scan every triple of the grid instead of a 25-point sub-grid
    #[arg(long)]
    pub full_scan: bool,
    /// Second generator for the compatibility check
    #[arg(long)]
    pub psi: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VorArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Required for bivariate functions
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400,800,1600")]
    pub degrees: Vec<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub source: Source,
    /// [default: the example's degree for catalog functions]
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// [default: the example's exponent for catalog functions, else 2]
    #[arg(long)]
    pub j: Option<u32>,
    /// Grid points per axis [default: 1001 in one variable, 201 in two]
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Op::Akr)]
    pub op: Op,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    /// Bound to check: bernstein, bivariate-old, bivariate-mixed, bivariate-new,
    /// akr-diff, akr-diff-modulus, akr, akr-2d [default: all that apply]
    #[arg(long)]
    pub kind: Option<String>,
    /// Grid points per axis [default: 1001 in one variable, 101 in two]
    #[arg(long)]
    pub points: Option<usize>,
    /// Emit bound and error at every grid point (requires --kind)
    #[arg(long, requires = "kind")]
    pub pointwise: bool,
    #[command(flatten)]
    pub output: Output,
}
