use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Hardy space infinite elements: DtN maps, 1D scattering, resonances and
/// consistency checks.
#[derive(Parser, Debug)]
#[command(
    name = "hsiem",
    version,
    about,
    after_help = "Options may also be read from `--config FILE` (lines `key = value`, keys are long flag names); \
                  flags given on the command line take precedence. HSIEM_THREADS caps sweep parallelism."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hardy DtN approximation `dtn(κ, κ₀, N)` against `−iκ`, swept over N.
    Dtn(DtnArgs),
    /// 1D scattering with exact solution `e^{iκx}`.
    Scatter1d(Scatter1dArgs),
    /// Resonances of the dielectric slab or of a sphere mode.
    Resonances(ResonanceArgs),
    /// Exactness of the discrete tensor de Rham complex.
    SequenceCheck(SequenceArgs),
    /// Segment forms against the radial quadrature oracle.
    FormsCheck(FormsArgs),
    /// Error against the closed-form reference along a parameter sweep.
    Convergence(ConvergenceArgs),
}

/// Parses `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("invalid number '{t}' in '{s}'"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected 're,im', got '{s}'")),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

/// A complex `κ₀` with positive real part.
pub fn parse_kappa0(s: &str) -> Result<Complex64, String> {
    let z = parse_complex(s)?;
    if z.re > 0.0 {
        Ok(z)
    } else {
        Err(format!("kappa0 needs a positive real part, got '{s}'"))
    }
}

pub fn parse_finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("non-finite value '{s}'"))
    }
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// CSV output path; stdout if absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Append a wall-clock runtime column (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct DtnArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2,0")]
    pub kappa: Complex64,
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true, default_value = "1,0")]
    pub kappa0: Complex64,
    #[arg(long, default_value_t = 0)]
    pub n_min: usize,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Scatter1dArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2,0")]
    pub kappa: Complex64,
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true, default_value = "1,0")]
    pub kappa0: Complex64,
    /// Hardy truncation; with --sweep every N in 0..=n.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long)]
    pub sweep: bool,
    /// Left end of the interior [a, 0].
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value = "-1")]
    pub a: f64,
    #[arg(long, default_value_t = 2)]
    pub elements: usize,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Replace the Hardy exterior by the exact condition −iκ.
    #[arg(long)]
    pub exact_dtn: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceCase {
    Slab,
    Sphere,
}

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    #[arg(long, value_enum)]
    pub case: ResonanceCase,
    /// Slab permittivity (> 1).
    #[arg(long, value_parser = parse_finite, default_value = "4")]
    pub eps: f64,
    /// Sphere harmonic degree.
    #[arg(long, default_value_t = 2)]
    pub mode: usize,
    /// Default: 2 for the slab, 5,-1 for the sphere.
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true)]
    pub kappa0: Option<Complex64>,
    /// Hardy truncation. Default: 20 for the slab, 15 for the sphere.
    #[arg(long)]
    pub n: Option<usize>,
    /// Slab interior order.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[arg(long, default_value_t = 4)]
    pub elements: usize,
    /// Default: 2 for the slab, 1 for the sphere.
    #[arg(long)]
    pub count: Option<usize>,
    /// Target in the κ plane; the shift is its square. Default: mean of the
    /// first `count` slab references, or the leading Hankel root.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub target: Option<Complex64>,
    #[arg(long, value_parser = parse_finite, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long, value_parser = parse_finite, default_value = "0.5")]
    pub tail_threshold: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SequenceArgs {
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Check every (p, N) in 1..=p-max × 0..=n-max instead of one pair.
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true, default_value = "1,0")]
    pub kappa0: Complex64,
    /// Relative SVD rank tolerance.
    #[arg(long, value_parser = parse_finite, default_value = "1e-10")]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    H1,
    Hcurl,
    Hdiv,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Unit octant triangle with apex at the origin.
    Octant,
    /// A generic tilted triangle with an off-centre apex.
    Skewed,
}

#[derive(Args, Debug)]
pub struct FormsArgs {
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true, default_value = "3,1")]
    pub kappa0: Complex64,
    #[arg(long, value_enum, default_value = "all")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "octant")]
    pub geometry: Geometry,
    #[arg(long, value_parser = parse_finite, default_value = "1e-6")]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceCaseArg {
    Dtn,
    Slab,
    SlabOrder,
    Sphere,
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub case: ConvergenceCaseArg,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2,0")]
    pub kappa: Complex64,
    /// Default: 1 for dtn, 2 for the slab cases, 5,-1 for the sphere.
    #[arg(long, value_parser = parse_kappa0, allow_hyphen_values = true)]
    pub kappa0: Option<Complex64>,
    #[arg(long, value_parser = parse_finite, default_value = "4")]
    pub eps: f64,
    /// Slab resonance index.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub mode: usize,
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[arg(long, default_value_t = 4)]
    pub elements: usize,
    /// Fixed N for slab-order.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub n_min: usize,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long, default_value_t = 2)]
    pub order_min: usize,
    #[arg(long, default_value_t = 12)]
    pub order_max: usize,
    #[command(flatten)]
    pub output: Output,
}
