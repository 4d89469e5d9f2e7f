use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divmetric_core::{Family, NamedMeasure, SParam};
use serde::Serialize;

/// Symmetric divergences, their square-root metrics, verification suites and
/// a metric-tree index.
#[derive(Debug, Parser)]
#[command(name = "divmetric", version, about)]
pub struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Add wall-clock timing to the report (the report is then no longer
    /// reproducible byte for byte).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence between rows of histogram files.
    Compute(ComputeArgs),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifySuite),
    /// Build or query a VP-tree index.
    #[command(subcommand)]
    Index(IndexAction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Auto,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Input format; `auto` picks JSONL for .jsonl/.ndjson and CSV otherwise.
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// Add this mass to every entry, then renormalize. Allows zero entries.
    #[arg(long, value_name = "EPS")]
    pub smooth: Option<f64>,
    /// Rescale rows whose total is more than 1e-6 away from 1.
    #[arg(long)]
    pub renormalize: bool,
    /// Skip the first CSV line.
    #[arg(long)]
    pub header: bool,
    /// The first CSV column is a row id.
    #[arg(long)]
    pub id_column: bool,
}

/// Which measure to evaluate: a named one, or a family member.
#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Named measure: triangular, jensen-shannon, arithmetic-geometric,
    /// hellinger, d-divergence, j-divergence, symmetric-chi-squared, chi-squared.
    #[arg(long, value_parser = parse_measure, conflicts_with_all = ["family", "s"])]
    pub measure: Option<NamedMeasure>,
    /// Family: `ag` or `j`.
    #[arg(long, value_parser = parse_family, requires = "s")]
    pub family: Option<Family>,
    /// Family parameter.
    #[arg(long, value_parser = parse_s, allow_hyphen_values = true, requires = "family")]
    pub s: Option<SParam>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Row i of the first file against row i of the second.
    Zip,
    /// Every row of the first file against every row of the second.
    Cross,
    /// Every unordered pair of rows within one file.
    All,
    /// The first row against each later row.
    First,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Report √divergence as well.
    #[arg(long)]
    pub sqrt: bool,
    /// Pair selection; defaults to `zip` with two files and `all` with one.
    #[arg(long, value_enum)]
    pub pairs: Option<PairMode>,
    #[command(flatten)]
    pub input: InputArgs,
    /// One or two histogram files (`-` reads stdin).
    #[arg(required = true, num_args = 1..=2)]
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Ag,
    J,
    Both,
}

impl FamilyChoice {
    pub fn families(self) -> Vec<Family> {
        match self {
            FamilyChoice::Ag => vec![Family::Ag],
            FamilyChoice::J => vec![Family::J],
            FamilyChoice::Both => Family::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scalar,
    Simplex,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeedArg {
    /// Random seed; falls back to $DIVMETRIC_SEED, then 0.
    #[arg(long, env = "DIVMETRIC_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, value_enum, default_value_t = FamilyChoice::Both)]
    pub family: FamilyChoice,
    /// Parameter grid `lo:hi:step`, endpoints inclusive.
    #[arg(long, default_value = "-2:2:0.5", value_parser = parse_s_grid, allow_hyphen_values = true)]
    pub s_grid: SGrid,
}

#[derive(Debug, Subcommand)]
pub enum VerifySuite {
    /// Randomized triangle-inequality search for each (family, s).
    Triangle {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Mode::Scalar)]
        mode: Mode,
        /// Simplex dimension in simplex mode.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Scalar range lower end (log-uniform sampling).
        #[arg(long, default_value_t = 1e-3)]
        lo: f64,
        /// Scalar range upper end.
        #[arg(long, default_value_t = 1e3)]
        hi: f64,
        /// Relative tolerance, scaled by the longest side.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Use the raw divergence as the distance (negative control).
        #[arg(long)]
        no_sqrt: bool,
        /// Re-evaluate each witness at 256-bit precision.
        #[arg(long)]
        confirm: bool,
    },
    /// Seven-term inequality chain on random simplex pairs.
    Chain {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 100_000)]
        pairs: u64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        /// Absolute slack on each link.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Sign and monotonicity of the auxiliary n and h functions.
    Probe {
        #[command(flatten)]
        grid: GridArgs,
        /// Log-spaced grid size.
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = 1e-2)]
        t_min: f64,
        #[arg(long, default_value_t = 1e2)]
        t_max: f64,
        /// Also probe |h(t)| > |h(βt)| on (1/β, 1) for these β (report only).
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
    },
    /// Divergence / χ² ratio along P_t = Q + t(P0 - Q).
    Asymptotic {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.8")]
        q: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
        p0: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        t_seq: Vec<f64>,
        /// Allowed relative error of the last ratio.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    #[arg(long, value_parser = parse_s, allow_hyphen_values = true)]
    pub s: Option<SParam>,
}

#[derive(Debug, Subcommand)]
pub enum IndexAction {
    /// Build an index file from a histogram file.
    Build {
        /// Histogram file.
        input: String,
        #[command(flatten)]
        input_args: InputArgs,
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, value_parser = parse_s, allow_hyphen_values = true)]
        s: SParam,
        #[command(flatten)]
        seed: SeedArg,
        /// Where to write the index.
        #[arg(long)]
        index: PathBuf,
    },
    /// Query an index with the rows of a histogram file.
    Query {
        /// Index file written by `index build`.
        #[arg(long)]
        index: PathBuf,
        /// Histogram file with query rows.
        queries: String,
        #[command(flatten)]
        input_args: InputArgs,
        /// Number of neighbors.
        #[arg(long, conflicts_with = "radius")]
        k: Option<usize>,
        /// Return every point within this distance instead.
        #[arg(long)]
        radius: Option<f64>,
        /// Expected metric; must match the index when given.
        #[command(flatten)]
        metric: MetricArgs,
        /// Answer by linear scan instead of the tree.
        #[arg(long)]
        brute: bool,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
        .map_err(|e: divmetric_core::DivergenceError| e.to_string())
}

fn parse_measure(s: &str) -> Result<NamedMeasure, String> {
    s.parse()
        .map_err(|e: divmetric_core::DivergenceError| e.to_string())
}

/// Parses `s`, refusing values inside a limit window unless they are exactly
/// 0 or 1.
pub fn parse_s(text: &str) -> Result<SParam, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("s must be a decimal number, got {text:?}"))?;
    let s = SParam::new(v).map_err(|e| e.to_string())?;
    if s.is_near_limit_but_not_exact() {
        return Err(format!(
            "s = {text} lies within 1e-6 of 0 or 1 and would silently use the limit formula; pass 0 or 1 explicitly"
        ));
    }
    Ok(s)
}

/// An inclusive `lo:hi:step` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SGrid {
    pub spec: String,
    pub values: Vec<SParam>,
}

/// Parses `lo:hi:step`. Points are `lo + i·step` rounded to 12 decimals, up
/// to `hi + 1e-12`.
pub fn parse_s_grid(text: &str) -> Result<SGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("s grid must look like lo:hi:step, got {text:?}"))?;
    let values = match nums.as_slice() {
        [single] => vec![*single],
        [lo, hi, step] => {
            if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || *step <= 0.0 || hi < lo {
                return Err(format!("s grid needs lo <= hi and step > 0, got {text:?}"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as u64;
            if count > 1_000_000 {
                return Err("s grid has more than a million points".into());
            }
            (0..=count)
                .map(|i| lo + step * i as f64)
                .filter(|v| *v <= hi + 1e-12)
                .map(|v| (v * 1e12).round() / 1e12)
                .collect()
        }
        _ => return Err(format!("s grid must look like lo:hi:step, got {text:?}")),
    };
    let values = values
        .into_iter()
        .map(|v| parse_s(&v.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SGrid {
        spec: text.to_string(),
        values,
    })
}
