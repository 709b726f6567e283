use aztec::weights::WeightField;
use aztec::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Environment variable naming the worker-thread budget.
pub const THREADS_ENV: &str = "AZTEC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "aztec", version, about = "Exact dimer, path and kernel computations on Aztec diamonds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Size of the diamond.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Extra height of the tower, or corridor length for finite kernels.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Weight-field JSON file.
    #[arg(long, global = true, conflicts_with_all = ["periodic", "uniform"])]
    pub weights: Option<PathBuf>,
    /// Random periodic weights with a `q×p` fundamental domain, e.g. `2x2`.
    #[arg(long, global = true, conflicts_with = "uniform")]
    pub periodic: Option<String>,
    /// All weights equal to 1.
    #[arg(long, global = true)]
    pub uniform: bool,
    /// Seed of the single random generator used for weights.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tail tolerance of the limiting kernel.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Contour offset; defaults to the value derived from the weights.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Quadrature nodes per contour (a power of two).
    #[arg(long, global = true, default_value_t = 64)]
    pub nodes: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Render numbers as decimals instead of exact strings.
    #[arg(long, global = true)]
    pub float: bool,
    /// Significant digits after the point with `--float`.
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    Top,
    Bottom,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Kasteleyn matrix, determinant, sign and inverse (tower when `--p` is set).
    Kasteleyn,
    /// Path-count matrix W, its determinant and the matching count.
    Lgv,
    /// Eynard-Mehta kernel of the tower with `p` extra rows.
    KernelFinite {
        /// `m1,x1,m2,x2`; repeatable.
        #[arg(long = "query", required = true)]
        queries: Vec<String>,
    },
    /// Limiting kernel as the tower grows, truncated to `--tol`.
    KernelLimit {
        #[arg(long = "query", required = true)]
        queries: Vec<String>,
    },
    /// Face weights along the shuffle orbit.
    Shuffle {
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Only this face, as `k,j`.
        #[arg(long)]
        face: Option<String>,
    },
    /// Cross-checks between independent routes; nonzero exit when one fails.
    Verify,
    /// Symbols, Wiener-Hopf factors and contour kernels for periodic weights.
    Toeplitz {
        /// `m1,y1,m2,y2` in blocks; repeatable.
        #[arg(long = "query")]
        queries: Vec<String>,
        #[arg(long, value_enum, default_value_t = KernelMode::Top)]
        mode: KernelMode,
    },
    /// Inverse of W by the boundary recurrence, optionally the full inverse Kasteleyn matrix.
    Winv {
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Math(Error),
    Capacity(String),
    Io { path: Option<PathBuf>, message: String },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Math(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Config(m) => ("config".to_owned(), m.clone()),
            CliError::Math(e) => (e.kind().to_owned(), e.to_string()),
            CliError::Capacity(m) => ("capacity".to_owned(), m.clone()),
            CliError::Io { path, message } => {
                let m = match path {
                    Some(p) => format!("{}: {message}", p.display()),
                    None => message.clone(),
                };
                ("io".to_owned(), m)
            }
        };
        json!({ "error": { "code": self.code(), "kind": kind, "message": message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity(m) => CliError::Capacity(m),
            Error::Parse(m) => CliError::Config(m),
            other => CliError::Math(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Validated parameters of one run, echoed in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(flatten)]
    pub common: Common,
    pub threads: Option<usize>,
    pub weight_source: String,
}

impl RunConfig {
    pub fn validate(cli: &Cli) -> CliResult<Self> {
        let c = &cli.common;
        if c.n == 0 {
            return Err(CliError::Config("--n must be at least 1".into()));
        }
        if !(c.tol.is_finite() && c.tol > 0.0) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
        if c.epsilon.is_some_and(|e| !(e.is_finite() && e > 0.0)) {
            return Err(CliError::Config("--epsilon must be positive".into()));
        }
        if c.nodes < 4 || !c.nodes.is_power_of_two() {
            return Err(CliError::Config("--nodes must be a power of two, at least 4".into()));
        }
        if let Some(s) = &c.periodic {
            parse_dims(s)?;
        }
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&t| t > 0)
                    .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            ),
            Err(_) => None,
        };
        let weight_source = match (&c.weights, &c.periodic, c.uniform) {
            (Some(p), _, _) => format!("file:{}", p.display()),
            (_, Some(d), _) => format!("random-periodic:{d}"),
            (_, _, true) => "uniform".into(),
            _ => "random-window".into(),
        };
        Ok(RunConfig { command: cli.command.clone(), common: c.clone(), threads, weight_source })
    }

    pub fn p(&self) -> usize {
        self.common.p.unwrap_or(0)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.common.seed)
    }

    /// Weights from the file, the periodic shape, the uniform flag, or a
    /// seeded random window that covers every command's needs.
    pub fn weights(&self) -> CliResult<WeightField> {
        let c = &self.common;
        if let Some(path) = &c.weights {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: Some(path.clone()), message: e.to_string() })?;
            return WeightField::from_json(&text).map_err(|e| match e {
                Error::Parse(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other.into(),
            });
        }
        if let Some(s) = &c.periodic {
            let (q, p) = parse_dims(s)?;
            return Ok(WeightField::random_periodic(&mut self.rng(), q, p));
        }
        if c.uniform {
            return Ok(WeightField::uniform());
        }
        let n = c.n as i64;
        let reach = 4 * (n + self.p() as i64) + 16;
        Ok(WeightField::random_window(&mut self.rng(), 0, n - 1, -reach, reach))
    }
}

pub fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Config(format!("--periodic expects QxP with positive integers, got {s:?}"));
    let (q, p) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let q: usize = q.trim().parse().map_err(|_| bad())?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    if q == 0 || p == 0 {
        return Err(bad());
    }
    Ok((q, p))
}

/// Comma-separated integers with a fixed count.
pub fn parse_ints(s: &str, count: usize, what: &str) -> CliResult<Vec<i64>> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("{what} expects {count} comma-separated integers, got {s:?}")))?;
    if v.len() != count {
        return Err(CliError::Config(format!("{what} expects {count} comma-separated integers, got {s:?}")));
    }
    Ok(v)
}

pub fn parse_time(v: i64, what: &str) -> CliResult<usize> {
    usize::try_from(v).map_err(|_| CliError::Config(format!("{what}: times must be nonnegative")))
}
