//! Run configuration: defaults per command, overridden by a flat key-value
//! config file, overridden by CLI flags. The resolved configuration is echoed
//! into every output header so runs are reproducible from their artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use spinchain_core::corr::GmConvention;
use spinchain_core::ggm::BipartitionMode;

use crate::AppError;

/// CLI-provided overrides (everything optional).
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonOpts {
    /// Start of the alpha grid.
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// End of the alpha grid (inclusive).
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Grid step.
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Largest block order for the infinite-chain measures.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Chain lengths, comma separated (finite-chain commands).
    #[arg(long = "N", value_delimiter = ',')]
    pub chain_sizes: Option<Vec<usize>>,
    /// Geometric-measure convention.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Bipartition family for finite-chain measures.
    #[arg(long, value_enum)]
    pub bipartitions: Option<BipartitionsArg>,
    /// Symmetry-breaking field h (defaults to 0 for even N, 1e-6 for odd N).
    #[arg(long)]
    pub h_field: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads for sweep parallelism (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Kink-detector threshold factor.
    #[arg(long)]
    pub threshold_factor: Option<f64>,
    /// Seed for randomized self-test probes.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; stdout when omitted. Multi-N commands treat this as a
    /// directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key-value config file (lower precedence than flags).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ConventionArg {
    Paper,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BipartitionsArg {
    All,
    Contiguous,
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: &'static str,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub n_max: usize,
    pub chain_sizes: Vec<usize>,
    pub convention: GmConvention,
    pub bipartitions: BipartitionMode,
    pub h_field: Option<f64>,
    pub tol: f64,
    pub threads: usize,
    pub threshold_factor: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Per-command defaults (lowest precedence).
pub struct Defaults {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub n_max: usize,
    pub chain_sizes: &'static [usize],
}

pub const INFINITE_DEFAULTS: Defaults = Defaults {
    alpha_min: 0.0,
    alpha_max: 5.0,
    alpha_step: 0.01,
    n_max: 8,
    chain_sizes: &[],
};

pub const FINITE_DEFAULTS: Defaults = Defaults {
    alpha_min: 0.9,
    alpha_max: 3.0,
    alpha_step: 0.005,
    n_max: 8,
    chain_sizes: &[8, 10, 12],
};

pub const TABLE_DEFAULTS: Defaults = Defaults {
    alpha_min: 0.0,
    alpha_max: 0.0,
    alpha_step: 1.0,
    n_max: 7,
    chain_sizes: &[],
};

/// Key-value pairs from a flat config file: `key = value`, `#` comments.
fn parse_config_file(path: &std::path::Path) -> Result<BTreeMap<String, String>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(AppError::Config(format!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

const KNOWN_KEYS: &[&str] = &[
    "alpha-min",
    "alpha-max",
    "alpha-step",
    "n-max",
    "N",
    "convention",
    "bipartitions",
    "h-field",
    "tol",
    "threads",
    "threshold-factor",
    "seed",
    "out",
];

fn parse_num<T: core::str::FromStr>(key: &str, v: &str) -> Result<T, AppError> {
    v.parse()
        .map_err(|_| AppError::Config(format!("config key `{key}`: bad value `{v}`")))
}

/// Merge defaults, config file, and CLI flags (highest precedence last).
pub fn resolve(
    command: &'static str,
    opts: &CommonOpts,
    defaults: &Defaults,
) -> Result<Resolved, AppError> {
    let file = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    for key in file.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(AppError::Config(format!("unknown config key `{key}`")));
        }
    }
    let get = |key: &str| file.get(key);

    let alpha_min = match (opts.alpha_min, get("alpha-min")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("alpha-min", v)?,
        _ => defaults.alpha_min,
    };
    let alpha_max = match (opts.alpha_max, get("alpha-max")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("alpha-max", v)?,
        _ => defaults.alpha_max,
    };
    let alpha_step = match (opts.alpha_step, get("alpha-step")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("alpha-step", v)?,
        _ => defaults.alpha_step,
    };
    let n_max = match (opts.n_max, get("n-max")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("n-max", v)?,
        _ => defaults.n_max,
    };
    let chain_sizes = match (&opts.chain_sizes, get("N")) {
        (Some(v), _) => v.clone(),
        (None, Some(v)) => v
            .split(',')
            .map(|s| parse_num::<usize>("N", s.trim()))
            .collect::<Result<Vec<_>, _>>()?,
        _ => defaults.chain_sizes.to_vec(),
    };
    let convention = match (opts.convention, get("convention")) {
        (Some(ConventionArg::Paper), _) => GmConvention::PaperEigenvalue,
        (Some(ConventionArg::Strict), _) => GmConvention::StrictProduct,
        (None, Some(v)) => match v.as_str() {
            "paper" => GmConvention::PaperEigenvalue,
            "strict" => GmConvention::StrictProduct,
            other => {
                return Err(AppError::Config(format!(
                    "config key `convention`: `{other}`"
                )))
            }
        },
        _ => GmConvention::PaperEigenvalue,
    };
    let bipartitions = match (opts.bipartitions, get("bipartitions")) {
        (Some(BipartitionsArg::All), _) => BipartitionMode::All,
        (Some(BipartitionsArg::Contiguous), _) => BipartitionMode::ContiguousBlocks,
        (None, Some(v)) => match v.as_str() {
            "all" => BipartitionMode::All,
            "contiguous" => BipartitionMode::ContiguousBlocks,
            other => {
                return Err(AppError::Config(format!(
                    "config key `bipartitions`: `{other}`"
                )))
            }
        },
        _ => BipartitionMode::ContiguousBlocks,
    };
    let h_field = match (opts.h_field, get("h-field")) {
        (Some(v), _) => Some(v),
        (None, Some(v)) => Some(parse_num("h-field", v)?),
        _ => None,
    };
    let tol = match (opts.tol, get("tol")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("tol", v)?,
        _ => 1e-10,
    };
    let threads = match (opts.threads, get("threads")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("threads", v)?,
        _ => 0,
    };
    let threshold_factor = match (opts.threshold_factor, get("threshold-factor")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("threshold-factor", v)?,
        _ => 50.0,
    };
    let seed = match (opts.seed, get("seed")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_num("seed", v)?,
        _ => 42,
    };
    let out = match (&opts.out, get("out")) {
        (Some(v), _) => Some(v.clone()),
        (None, Some(v)) => Some(PathBuf::from(v)),
        _ => None,
    };

    let resolved = Resolved {
        command,
        alpha_min,
        alpha_max,
        alpha_step,
        n_max,
        chain_sizes,
        convention,
        bipartitions,
        h_field,
        tol,
        threads,
        threshold_factor,
        seed,
        out,
    };
    validate(&resolved)?;
    Ok(resolved)
}

fn validate(r: &Resolved) -> Result<(), AppError> {
    let bad = |x: f64| x.is_nan();
    if bad(r.alpha_min) || r.alpha_min < 0.0 {
        return Err(AppError::Config("alpha-min must be >= 0".into()));
    }
    if bad(r.alpha_max) || r.alpha_max < r.alpha_min {
        return Err(AppError::Config("alpha-max must be >= alpha-min".into()));
    }
    if bad(r.alpha_step) || r.alpha_step <= 0.0 {
        return Err(AppError::Config("alpha-step must be > 0".into()));
    }
    if r.n_max < 2 {
        return Err(AppError::Config("n-max must be >= 2".into()));
    }
    if bad(r.tol) || r.tol <= 0.0 {
        return Err(AppError::Config("tol must be > 0".into()));
    }
    if bad(r.threshold_factor) || r.threshold_factor <= 0.0 {
        return Err(AppError::Config("threshold-factor must be > 0".into()));
    }
    if let Some(h) = r.h_field {
        if bad(h) || h < 0.0 {
            return Err(AppError::Config("h-field must be >= 0".into()));
        }
    }
    for &n in &r.chain_sizes {
        if !(3..=16).contains(&n) {
            return Err(AppError::Config(format!(
                "N = {n} outside the supported range 3..=16"
            )));
        }
    }
    Ok(())
}

impl Resolved {
    /// Header echo: the full configuration, one `# key = value` line each.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command = {}", self.command);
        let _ = writeln!(s, "# N = {}", join_usize(&self.chain_sizes));
        let _ = writeln!(s, "# alpha-max = {}", self.alpha_max);
        let _ = writeln!(s, "# alpha-min = {}", self.alpha_min);
        let _ = writeln!(s, "# alpha-step = {}", self.alpha_step);
        let _ = writeln!(
            s,
            "# bipartitions = {}",
            match self.bipartitions {
                BipartitionMode::All => "all",
                BipartitionMode::ContiguousBlocks => "contiguous",
            }
        );
        let _ = writeln!(
            s,
            "# convention = {}",
            match self.convention {
                GmConvention::PaperEigenvalue => "paper",
                GmConvention::StrictProduct => "strict",
            }
        );
        let _ = writeln!(
            s,
            "# h-field = {}",
            self.h_field.map_or("auto".to_string(), |h| h.to_string())
        );
        let _ = writeln!(s, "# n-max = {}", self.n_max);
        let _ = writeln!(s, "# seed = {}", self.seed);
        let _ = writeln!(s, "# threads = {}", self.threads);
        let _ = writeln!(s, "# threshold-factor = {}", self.threshold_factor);
        let _ = writeln!(s, "# tol = {:e}", self.tol);
        s
    }
}

fn join_usize(v: &[usize]) -> String {
    let strs: Vec<String> = v.iter().map(|n| n.to_string()).collect();
    strs.join(",")
}
