//! Run configuration: `key=value` files and command-line flags.
//!
//! Both sources feed the same [`ConfigBuilder`], so every value goes through
//! one parser and every error names the flag or file line it came from.
//! Flags override file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cubic_minimax::baselines::{EgConfig, NewtonMinMaxConfig};
use cubic_minimax::ffcr::FfcrConfig;
use cubic_minimax::lfcr::{LfcrConfig, C_MAX, C_MIN, DEFAULT_BACKTRACK_CAP};
use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MINIMAX_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Lfcr,
    Ffcr,
    Eg,
    NewtonMinmax,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Lfcr, Algorithm::Ffcr, Algorithm::Eg, Algorithm::NewtonMinmax];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lfcr => "lfcr",
            Algorithm::Ffcr => "ffcr",
            Algorithm::Eg => "eg",
            Algorithm::NewtonMinmax => "newton_minmax",
        }
    }

    pub fn is_second_order(self) -> bool {
        self != Algorithm::Eg
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s || (*a == Algorithm::NewtonMinmax && s == "newton-minmax"))
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected lfcr, ffcr, eg or newton_minmax)"))
    }
}

/// Which FF-CR rows reach the CSV. Single-loop methods emit every row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    /// One row per stage.
    Outer,
    /// One row per proximal problem plus the stage rows.
    Inner,
    All,
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outer" => Ok(Granularity::Outer),
            "inner" => Ok(Granularity::Inner),
            "all" => Ok(Granularity::All),
            _ => Err(format!("unknown granularity {s:?} (expected outer, inner or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    /// Cubic-bilinear problem with `A = I` and `b` drawn from `b_seed`.
    Generated { n: usize, rho: f64, b_seed: u64 },
    /// Cubic-bilinear problem read from an instance file.
    Instance(PathBuf),
}

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("{}: unknown key", describe(key, origin))]
    UnknownKey { key: String, origin: Origin },
    #[error("config line {line}: {key} given twice")]
    Duplicate { key: String, line: usize },
    #[error("{}: {reason}", describe(key, origin))]
    InvalidValue { key: String, origin: Origin, reason: String },
    #[error("{}: does not apply to algorithm {algo}", describe(key, origin))]
    NotApplicable { key: String, origin: Origin, algo: Algorithm },
    #[error("algorithm {algo} requires {}", flag_name(key))]
    Missing { key: &'static str, algo: Algorithm },
    #[error("{} cannot be combined with {}", flag_name(key), flag_name(other))]
    Conflict { key: &'static str, other: &'static str },
}

fn flag_name(key: &str) -> String {
    format!("--{}", key.replace('_', "-"))
}

fn describe(key: &str, origin: &Origin) -> String {
    match origin {
        Origin::Line(n) => format!("config line {n} ({key})"),
        Origin::Flag => flag_name(key),
        Origin::Default => key.to_string(),
    }
}

/// Every accepted key with the algorithms it applies to (`None` = all).
const KEYS: &[(&str, Option<&[Algorithm]>)] = &[
    ("problem", None),
    ("n", None),
    ("rho", None),
    ("instance", None),
    ("b_seed", None),
    ("algo", None),
    ("seed", None),
    ("trace", None),
    ("granularity", None),
    ("trace_stride", None),
    ("c", Some(&[Algorithm::Lfcr, Algorithm::Ffcr, Algorithm::NewtonMinmax])),
    ("h0", Some(&[Algorithm::Lfcr])),
    ("m0", Some(&[Algorithm::Ffcr])),
    ("d0", Some(&[Algorithm::Ffcr])),
    ("eps", Some(&[Algorithm::Ffcr])),
    ("max_outer", Some(&[Algorithm::Ffcr])),
    ("warm_start_m", Some(&[Algorithm::Ffcr])),
    ("max_inner_iters", Some(&[Algorithm::Ffcr])),
    ("eta", Some(&[Algorithm::Eg])),
    ("rho_known", Some(&[Algorithm::NewtonMinmax])),
    ("max_iters", Some(&[Algorithm::Lfcr, Algorithm::Eg, Algorithm::NewtonMinmax])),
    ("grad_tol", Some(&[Algorithm::Lfcr, Algorithm::Eg, Algorithm::NewtonMinmax])),
];

/// Collects raw `key=value` pairs, then validates them into a [`RunConfig`].
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing any earlier value. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        let normalized = key.trim().replace('-', "_");
        let Some(&(known, _)) = KEYS.iter().find(|(k, _)| *k == normalized) else {
            return Err(ConfigError::UnknownKey { key: key.trim().to_string(), origin });
        };
        if let Origin::Line(line) = origin {
            if matches!(self.values.get(known), Some((_, Origin::Line(_)))) {
                return Err(ConfigError::Duplicate { key: known.to_string(), line });
            }
        }
        self.values.insert(known, (value.trim().to_string(), origin));
        Ok(())
    }

    /// Reads `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn read_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed { line, text: raw.to_string() });
            };
            if key.trim().is_empty() {
                return Err(ConfigError::Malformed { line, text: raw.to_string() });
            }
            self.set(key, value, Origin::Line(line))?;
        }
        Ok(())
    }

    pub fn read_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.read_str(&text)
    }

    fn raw(&self, key: &'static str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    fn parse<T>(&self, key: &'static str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((value, origin)) => parse(value).map(Some).map_err(|reason| ConfigError::InvalidValue {
                key: key.to_string(),
                origin: origin.clone(),
                reason,
            }),
        }
    }

    fn invalid(&self, key: &'static str, reason: String) -> ConfigError {
        let origin = self.raw(key).map_or(Origin::Default, |(_, o)| o.clone());
        ConfigError::InvalidValue { key: key.to_string(), origin, reason }
    }

    pub fn build(&self) -> Result<RunConfig, ConfigError> {
        let algorithm = self.parse("algo", |s| s.parse::<Algorithm>())?.unwrap_or(Algorithm::Lfcr);
        for (key, (_, origin)) in &self.values {
            let applies = KEYS
                .iter()
                .find(|(k, _)| k == key)
                .and_then(|(_, algos)| *algos)
                .is_none_or(|algos| algos.contains(&algorithm));
            if !applies {
                return Err(ConfigError::NotApplicable {
                    key: key.to_string(),
                    origin: origin.clone(),
                    algo: algorithm,
                });
            }
        }

        if let Some(kind) = self.parse("problem", |s| Ok(s.to_string()))? {
            if kind != "cubic" {
                return Err(self.invalid("problem", format!("unknown problem {kind:?} (expected cubic)")));
            }
        }
        let seed = self.parse("seed", parse_u64)?.unwrap_or(0);
        let instance = self.parse("instance", |s| Ok(PathBuf::from(s)))?;
        let problem = match instance {
            Some(path) => {
                for other in ["n", "rho", "b_seed"] {
                    if self.raw(other).is_some() {
                        return Err(ConfigError::Conflict { key: "instance", other });
                    }
                }
                ProblemSource::Instance(path)
            }
            None => ProblemSource::Generated {
                n: self.parse("n", parse_count)?.unwrap_or(50),
                rho: self.parse("rho", parse_positive)?.unwrap_or(10.0),
                b_seed: self.parse("b_seed", parse_u64)?.unwrap_or(seed),
            },
        };

        let c = self.parse("c", parse_real)?.unwrap_or(C_MAX);
        if !(C_MIN..=C_MAX).contains(&c) {
            return Err(self.invalid("c", format!("{c} is outside [1/33, 1/13]")));
        }
        let max_iters = self.parse("max_iters", parse_count)?.unwrap_or(1000);
        let grad_tol = self.parse("grad_tol", parse_nonnegative)?.unwrap_or(0.0);

        let params = match algorithm {
            Algorithm::Lfcr => AlgoParams::Lfcr(LfcrConfig {
                c,
                h0: self.parse("h0", parse_positive)?.unwrap_or(1.0),
                max_iters,
                grad_tol,
                backtrack_cap: DEFAULT_BACKTRACK_CAP,
                record_steps: false,
            }),
            Algorithm::Ffcr => AlgoParams::Ffcr(FfcrConfig {
                epsilon: self.parse("eps", parse_positive)?.unwrap_or(1e-3),
                m0: self.parse("m0", parse_positive)?.unwrap_or(1.0),
                d0: self.parse("d0", parse_positive)?.unwrap_or(1.0),
                c,
                max_outer: self.parse("max_outer", parse_count)?.unwrap_or(20),
                backtrack_cap: DEFAULT_BACKTRACK_CAP,
                warm_start_m: self.parse("warm_start_m", parse_bool)?.unwrap_or(false),
                max_inner_iters: self.parse("max_inner_iters", parse_count)?,
                record_steps: false,
            }),
            Algorithm::Eg => AlgoParams::Eg(EgConfig {
                eta: self
                    .parse("eta", parse_positive)?
                    .ok_or(ConfigError::Missing { key: "eta", algo: algorithm })?,
                max_iters,
                grad_tol,
            }),
            Algorithm::NewtonMinmax => AlgoParams::NewtonMinmax {
                rho_known: self.parse("rho_known", parse_positive)?,
                config: NewtonMinMaxConfig {
                    rho: 1.0,
                    c,
                    max_iters,
                    grad_tol,
                    record_steps: false,
                },
            },
        };

        Ok(RunConfig {
            problem,
            seed,
            params,
            trace: self.parse("trace", |s| Ok(PathBuf::from(s)))?,
            granularity: self.parse("granularity", |s| s.parse())?.unwrap_or(Granularity::All),
            trace_stride: self.parse("trace_stride", parse_count)?.unwrap_or(1),
        })
    }
}

/// Algorithm-specific settings, already in the solver's own config types.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgoParams {
    Lfcr(LfcrConfig),
    Ffcr(FfcrConfig),
    Eg(EgConfig),
    /// `rho_known = None` uses the problem's own `ρ`.
    NewtonMinmax { rho_known: Option<f64>, config: NewtonMinMaxConfig },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    /// Seed of the initial-point perturbation.
    pub seed: u64,
    pub params: AlgoParams,
    /// CSV path; `None` writes `<out dir>/<default name>.csv`.
    pub trace: Option<PathBuf>,
    pub granularity: Granularity,
    /// Keep every `trace_stride`-th row in the CSV (first and last always kept).
    pub trace_stride: usize,
}

impl RunConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self.params {
            AlgoParams::Lfcr(_) => Algorithm::Lfcr,
            AlgoParams::Ffcr(_) => Algorithm::Ffcr,
            AlgoParams::Eg(_) => Algorithm::Eg,
            AlgoParams::NewtonMinmax { .. } => Algorithm::NewtonMinmax,
        }
    }

    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        let mut b = ConfigBuilder::new();
        b.read_str(text)?;
        b.build()
    }

    pub fn default_stem(&self) -> String {
        match &self.problem {
            ProblemSource::Generated { n, rho, .. } => {
                format!("{}-n{}-rho{}-seed{}", self.algorithm(), n, rho, self.seed)
            }
            ProblemSource::Instance(path) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
                format!("{}-{}-seed{}", self.algorithm(), stem, self.seed)
            }
        }
    }

    /// The CSV path, defaulting to the directory in `MINIMAX_OUT_DIR` (or `.`).
    pub fn trace_path(&self) -> PathBuf {
        self.trace.clone().unwrap_or_else(|| {
            let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
            dir.join(format!("{}.csv", self.default_stem()))
        })
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
            num / den
        }
        None => s.parse().map_err(|_| format!("{s:?} is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be nonnegative, got {v}"))
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("{s:?} is not a nonnegative integer"))
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("{s:?} is not a positive integer")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("{s:?} is not a boolean")),
    }
}
