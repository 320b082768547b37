//! Command line, config file and environment, merged into one [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ekr_core::bounds::BoundConfig;
use ekr_core::kneser::SearchBudget;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "ekr",
    version,
    about = "EKR verification suites and threshold experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Derived constants of K(n,k)
    Params,
    /// Johnson graph J_c(m,k) spectrum: formula against dense solver
    Spectrum,
    /// Counting identities over non-star M-families
    VerifyIdentities,
    /// Inequality chain over non-star M-families
    VerifyBounds,
    /// Smallest edge-count ratio over non-star M-families
    ThetaScan,
    /// The union-bound sum
    UnionBound,
    /// Bisection estimate of the EKR threshold
    EstimatePc,
    /// Threshold estimates for n = 2k+1, k = 2..=--k
    Trend,
    /// Near-star violation rate
    NearStar,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Spectrum => "spectrum",
            Command::VerifyIdentities => "verify-identities",
            Command::VerifyBounds => "verify-bounds",
            Command::ThetaScan => "theta-scan",
            Command::UnionBound => "union-bound",
            Command::EstimatePc => "estimate-pc",
            Command::Trend => "trend",
            Command::NearStar => "near-star",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Every flag is optional; unset flags fall back to the config file, then to
/// defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Johnson ground set size (default n-1)
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Johnson distance (default n-2k)
    #[arg(long, global = true)]
    pub c: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long = "bigC", global = true)]
    pub big_c: Option<f64>,
    #[arg(long, global = true)]
    pub zeta: Option<f64>,
    #[arg(long = "bigK", global = true)]
    pub big_k: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Master seed (default $EKR_SEED, else 1)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Bisection bracket width
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seconds allowed per exact search; 0 means unlimited
    #[arg(long = "time-budget", global = true)]
    pub time_budget: Option<u64>,
    /// Report path (default standard output)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key=value file, or a JSON report whose "config" is reused
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// The resolved run. Echoed in every report; feeding the echo back through
/// `--config` reproduces the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub c: usize,
    pub p: f64,
    pub theta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(rename = "bigC")]
    pub big_c: f64,
    pub zeta: Option<f64>,
    #[serde(rename = "bigK")]
    pub big_k: f64,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    #[serde(rename = "time-budget")]
    pub time_budget: u64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn bound_config(&self) -> BoundConfig {
        BoundConfig {
            theta: self.theta,
            gamma: self.gamma,
            epsilon: self.epsilon,
            big_c: self.big_c,
            big_k: self.big_k,
            zeta: self.zeta,
            xi: None,
        }
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: None,
            time_limit: (self.time_budget > 0).then(|| Duration::from_secs(self.time_budget)),
        }
    }
}

const KEYS: [&str; 17] = [
    "n",
    "k",
    "m",
    "c",
    "p",
    "theta",
    "gamma",
    "epsilon",
    "bigC",
    "zeta",
    "bigK",
    "trials",
    "seed",
    "tol",
    "time-budget",
    "output",
    "format",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config: cannot parse {key} = {value:?}"))
}

/// Reads a config file into flag form.
pub fn read_config_file(path: &Path) -> Result<Flags, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let pairs = if text.trim_start().starts_with('{') {
        json_pairs(&text)?
    } else {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        pairs
    };
    flags_from_pairs(&pairs)
}

fn json_pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("config: invalid JSON: {e}"))?;
    let object = value
        .get("config")
        .unwrap_or(&value)
        .as_object()
        .ok_or("config: JSON config must be an object")?;
    Ok(object
        .iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| {
            let v = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.clone(), v)
        })
        .collect())
}

fn flags_from_pairs(pairs: &[(String, String)]) -> Result<Flags, String> {
    let mut f = Flags::default();
    let mut seen = BTreeMap::new();
    for (key, value) in pairs {
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("config: unknown key {key:?}"));
        }
        if seen.insert(key.as_str(), ()).is_some() {
            return Err(format!("config: duplicate key {key:?}"));
        }
        let v = value.as_str();
        match key.as_str() {
            "n" => f.n = Some(parse_value(key, v)?),
            "k" => f.k = Some(parse_value(key, v)?),
            "m" => f.m = Some(parse_value(key, v)?),
            "c" => f.c = Some(parse_value(key, v)?),
            "p" => f.p = Some(parse_value(key, v)?),
            "theta" => f.theta = Some(parse_value(key, v)?),
            "gamma" => f.gamma = Some(parse_value(key, v)?),
            "epsilon" => f.epsilon = Some(parse_value(key, v)?),
            "bigC" => f.big_c = Some(parse_value(key, v)?),
            "zeta" => f.zeta = Some(parse_value(key, v)?),
            "bigK" => f.big_k = Some(parse_value(key, v)?),
            "trials" => f.trials = Some(parse_value(key, v)?),
            "seed" => f.seed = Some(parse_value(key, v)?),
            "tol" => f.tol = Some(parse_value(key, v)?),
            "time-budget" => f.time_budget = Some(parse_value(key, v)?),
            "output" => f.output = Some(PathBuf::from(v)),
            "format" => {
                f.format = Some(
                    Format::from_str(v, true)
                        .map_err(|_| format!("config: unknown format {v:?}"))?,
                )
            }
            _ => unreachable!(),
        }
    }
    Ok(f)
}

/// `top` wins over `base` field by field.
fn overlay(top: Flags, base: Flags) -> Flags {
    Flags {
        n: top.n.or(base.n),
        k: top.k.or(base.k),
        m: top.m.or(base.m),
        c: top.c.or(base.c),
        p: top.p.or(base.p),
        theta: top.theta.or(base.theta),
        gamma: top.gamma.or(base.gamma),
        epsilon: top.epsilon.or(base.epsilon),
        big_c: top.big_c.or(base.big_c),
        zeta: top.zeta.or(base.zeta),
        big_k: top.big_k.or(base.big_k),
        trials: top.trials.or(base.trials),
        seed: top.seed.or(base.seed),
        tol: top.tol.or(base.tol),
        time_budget: top.time_budget.or(base.time_budget),
        output: top.output.or(base.output),
        format: top.format.or(base.format),
        config: top.config.or(base.config),
    }
}

/// Flags over config file over environment over defaults.
pub fn resolve(flags: Flags, env_seed: Option<&str>) -> Result<RunConfig, String> {
    let from_file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Flags::default(),
    };
    let f = overlay(flags, from_file);
    let env_seed = env_seed
        .map(|s| parse_value::<u64>("EKR_SEED", s.trim()))
        .transpose()?;
    let defaults = BoundConfig::default();
    let n = f.n.unwrap_or(5);
    let k = f.k.unwrap_or(2);
    Ok(RunConfig {
        n,
        k,
        m: f.m.unwrap_or(n.saturating_sub(1)),
        c: f.c.unwrap_or_else(|| n.saturating_sub(2 * k).max(1)),
        p: f.p.unwrap_or(0.9),
        theta: f.theta.unwrap_or(defaults.theta),
        gamma: f.gamma.unwrap_or(defaults.gamma),
        epsilon: f.epsilon.unwrap_or(defaults.epsilon),
        big_c: f.big_c.unwrap_or(defaults.big_c),
        zeta: f.zeta,
        big_k: f.big_k.unwrap_or(defaults.big_k),
        trials: f.trials.unwrap_or(1000),
        seed: f.seed.or(env_seed).unwrap_or(1),
        tol: f.tol.unwrap_or(0.01),
        time_budget: f.time_budget.unwrap_or(0),
        format: f.format.unwrap_or(Format::Json),
        output: f.output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &[(&str, &str)]) -> Vec<(String, String)> {
        s.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn defaults_follow_n_and_k() {
        let cfg = resolve(Flags::default(), None).unwrap();
        assert_eq!((cfg.n, cfg.k, cfg.m, cfg.c), (5, 2, 4, 1));
        assert_eq!(cfg.seed, 1);
        let cfg = resolve(Flags::default(), Some("77")).unwrap();
        assert_eq!(cfg.seed, 77);
        assert!(resolve(Flags::default(), Some("x")).is_err());
    }

    #[test]
    fn flags_beat_file() {
        let file = flags_from_pairs(&pairs(&[("n", "7"), ("k", "3"), ("seed", "4")])).unwrap();
        let top = Flags {
            seed: Some(9),
            ..Flags::default()
        };
        let cfg = resolve(overlay(top, file), Some("5")).unwrap();
        assert_eq!((cfg.n, cfg.k, cfg.seed), (7, 3, 9));
    }

    #[test]
    fn bad_keys_rejected() {
        assert!(flags_from_pairs(&pairs(&[("nn", "7")])).is_err());
        assert!(flags_from_pairs(&pairs(&[("n", "seven")])).is_err());
        assert!(flags_from_pairs(&pairs(&[("n", "7"), ("n", "8")])).is_err());
        assert!(flags_from_pairs(&pairs(&[("format", "xml")])).is_err());
    }

    #[test]
    fn json_echo_is_accepted() {
        let text =
            r#"{"command":"params","config":{"n":7,"k":3,"zeta":null,"format":"csv","bigC":50.0}}"#;
        let f = flags_from_pairs(&json_pairs(text).unwrap()).unwrap();
        assert_eq!(
            (f.n, f.k, f.zeta, f.big_c),
            (Some(7), Some(3), None, Some(50.0))
        );
        assert_eq!(f.format, Some(Format::Csv));
    }
}
