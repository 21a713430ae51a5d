//! Run settings shared by all subcommands: parsed from a TOML/JSON file,
//! overridden by command-line flags, then validated per subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sincd::Method;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

/// A value written either as a string (`"6.1:6.9:0.1"`, `"MLE,RBE"`) or as a
/// native list in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListSpec<T> {
    Text(String),
    Items(Vec<T>),
    One(T),
}

/// Every field a config file may carry. Names match the long CLI flags with
/// dashes turned into underscores.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub n: Option<ListSpec<u32>>,
    pub t: Option<ListSpec<f64>>,
    pub shots: Option<u64>,
    pub round_size: Option<u64>,
    pub seed: Option<u64>,
    pub noise: Option<f64>,
    pub methods: Option<ListSpec<String>>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub rounds: Option<usize>,
    pub reps: Option<usize>,
    pub counts: Option<PathBuf>,
    pub radius_shots: Option<ListSpec<u64>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl Settings {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let is_json = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(anyhow::Error::from)
        } else {
            toml::from_str(&text).map_err(anyhow::Error::from)
        };
        parsed.map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: Settings) -> Self {
        overlay!(
            self,
            top,
            n,
            t,
            shots,
            round_size,
            seed,
            noise,
            methods,
            alpha,
            out,
            samples,
            rounds,
            reps,
            counts,
            radius_shots
        );
        self
    }
}

fn parse_f64(field: &'static str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| ConfigError::new(field, format!("{s:?} is not a number")))
}

/// `"a,b,c"` or an inclusive range `"start:stop:step"`.
pub fn parse_t_values(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64("t", start)?, parse_f64("t", stop)?, parse_f64("t", step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(ConfigError::new("t", "range needs start <= stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // Rounding removes accumulated drift so 6.1:6.9:0.1 yields 6.3, not 6.300000000000001.
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [_] => s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| parse_f64("t", p))
            .collect(),
        _ => Err(ConfigError::new("t", format!("cannot parse {s:?}"))),
    }
}

/// `"3"`, `"1,2,5"`, or an inclusive range `"1..8"` / `"1:8"`.
pub fn parse_n_values(s: &str) -> Result<Vec<u32>> {
    let parse = |p: &str| {
        p.trim()
            .parse::<u32>()
            .map_err(|_| ConfigError::new("n", format!("{p:?} is not a qubit count")))
    };
    let range = s.split_once("..").or_else(|| s.split_once(':'));
    if let Some((a, b)) = range {
        let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
        if a > b {
            return Err(ConfigError::new("n", format!("empty range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse).collect()
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m = part
            .parse::<Method>()
            .map_err(|e| ConfigError::new("methods", e.to_string()))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(ConfigError::new("methods", "no methods given"));
    }
    methods.sort();
    Ok(methods)
}

impl ListSpec<f64> {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            ListSpec::Text(s) => parse_t_values(s),
            ListSpec::Items(v) => Ok(v.clone()),
            ListSpec::One(v) => Ok(vec![*v]),
        }
    }
}

impl ListSpec<u32> {
    pub fn resolve(&self) -> Result<Vec<u32>> {
        match self {
            ListSpec::Text(s) => parse_n_values(s),
            ListSpec::Items(v) => Ok(v.clone()),
            ListSpec::One(v) => Ok(vec![*v]),
        }
    }
}

impl ListSpec<u64> {
    pub fn resolve(&self, field: &'static str) -> Result<Vec<u64>> {
        match self {
            ListSpec::Text(s) => s
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|_| ConfigError::new(field, format!("{p:?} is not an integer")))
                })
                .collect(),
            ListSpec::Items(v) => Ok(v.clone()),
            ListSpec::One(v) => Ok(vec![*v]),
        }
    }
}

impl ListSpec<String> {
    pub fn resolve(&self) -> Result<Vec<Method>> {
        match self {
            ListSpec::Text(s) | ListSpec::One(s) => parse_methods(s),
            ListSpec::Items(v) => parse_methods(&v.join(",")),
        }
    }
}

fn single_n(settings: &Settings, default: u32) -> Result<u32> {
    match &settings.n {
        None => Ok(default),
        Some(spec) => match spec.resolve()?.as_slice() {
            [n] => Ok(*n),
            _ => Err(ConfigError::new("n", "expected a single qubit count")),
        },
    }
}

fn check_n(n: u32) -> Result<u32> {
    if n == 0 || n > sincd::sinc::MAX_QUBITS {
        return Err(ConfigError::new(
            "n",
            format!("must be in 1..={}, got {n}", sincd::sinc::MAX_QUBITS),
        ));
    }
    Ok(n)
}

fn t_values(settings: &Settings, n: u32, default: &str) -> Result<Vec<f64>> {
    let values = match &settings.t {
        Some(spec) => spec.resolve()?,
        None => parse_t_values(default)?,
    };
    if values.is_empty() {
        return Err(ConfigError::new("t", "no values given"));
    }
    let dim = (1u64 << n) as f64;
    if let Some(bad) = values.iter().find(|t| !(**t >= 0.0 && **t < dim)) {
        return Err(ConfigError::new("t", format!("{bad} is outside [0, {dim})")));
    }
    Ok(values)
}

fn alpha(settings: &Settings) -> Result<f64> {
    let a = settings.alpha.unwrap_or(0.05);
    if !(a > 0.0 && a < 1.0) {
        return Err(ConfigError::new("alpha", format!("must lie in (0, 1), got {a}")));
    }
    Ok(a)
}

fn positive(field: &'static str, v: u64) -> Result<u64> {
    if v == 0 {
        return Err(ConfigError::new(field, "must be positive"));
    }
    Ok(v)
}

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: u32,
    pub t_values: Vec<f64>,
    pub shots: u64,
    pub round_size: u64,
    pub seed: u64,
    pub noise: f64,
    pub methods: Vec<Method>,
    pub alpha: f64,
}

impl SweepConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let n = check_n(single_n(s, 3)?)?;
        let shots = positive("shots", s.shots.unwrap_or(20_000))?;
        let round_size = positive("round_size", s.round_size.unwrap_or(1000))?;
        if round_size > shots {
            return Err(ConfigError::new(
                "round_size",
                format!("{round_size} exceeds shots ({shots})"),
            ));
        }
        let noise = s.noise.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&noise) {
            return Err(ConfigError::new("noise", format!("must lie in [0, 1], got {noise}")));
        }
        Ok(Self {
            n,
            t_values: t_values(s, n, "6.1:6.9:0.1")?,
            shots,
            round_size,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            noise,
            methods: match &s.methods {
                Some(m) => m.resolve()?,
                None => vec![Method::Mle, Method::Rbe, Method::Coin],
            },
            alpha: alpha(s)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub n_values: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    /// Fixed values replacing the random draws.
    pub t_values: Option<Vec<f64>>,
}

impl VerifyConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let n_values = match &s.n {
            Some(spec) => spec.resolve()?,
            None => (1..=8).collect(),
        };
        if n_values.is_empty() {
            return Err(ConfigError::new("n", "no qubit counts given"));
        }
        for &n in &n_values {
            check_n(n)?;
        }
        let t_values = match &s.t {
            Some(spec) => {
                let values = spec.resolve()?;
                let smallest = 1u64 << n_values.iter().min().copied().unwrap_or(1);
                if let Some(bad) = values.iter().find(|t| !(**t >= 0.0 && **t < smallest as f64)) {
                    return Err(ConfigError::new(
                        "t",
                        format!("{bad} is outside [0, {smallest}) for the smallest n"),
                    ));
                }
                Some(values)
            }
            None => None,
        };
        Ok(Self {
            n_values,
            samples: s.samples.unwrap_or(100),
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            t_values,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentsConfig {
    pub n: u32,
    pub t_values: Vec<f64>,
    pub shots: u64,
    pub rounds: usize,
    pub seed: u64,
}

impl MomentsConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let n = check_n(single_n(s, 3)?)?;
        let rounds = s.rounds.unwrap_or(100);
        if rounds < 2 {
            return Err(ConfigError::new("rounds", "need at least 2 rounds for a variance"));
        }
        Ok(Self {
            n,
            t_values: t_values(s, n, "6.05:6.95:0.05")?,
            shots: positive("shots", s.shots.unwrap_or(1000))?,
            rounds,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub n: u32,
    pub t_values: Vec<f64>,
    pub shots: u64,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Shot counts for the delta-vs-credible radius table.
    pub radius_shots: Vec<u64>,
}

impl CoverageConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let n = check_n(single_n(s, 3)?)?;
        let reps = s.reps.unwrap_or(1000);
        if reps == 0 {
            return Err(ConfigError::new("reps", "must be positive"));
        }
        let radius_shots = match &s.radius_shots {
            Some(spec) => spec.resolve("radius_shots")?,
            None => vec![100, 200, 500, 1000, 2000, 5000, 10_000, 20_000],
        };
        for &l in &radius_shots {
            positive("radius_shots", l)?;
        }
        Ok(Self {
            n,
            t_values: t_values(s, n, "4.2,4.5,4.8")?,
            shots: positive("shots", s.shots.unwrap_or(1000))?,
            reps,
            alpha: alpha(s)?,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            radius_shots,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub counts: PathBuf,
    pub methods: Vec<Method>,
    pub alpha: f64,
}

impl EstimateConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        Ok(Self {
            counts: s
                .counts
                .clone()
                .ok_or_else(|| ConfigError::new("counts", "a counts file is required"))?,
            methods: match &s.methods {
                Some(m) => m.resolve()?,
                None => Method::ALL.to_vec(),
            },
            alpha: alpha(s)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_ranges() {
        let v = parse_t_values("6.1:6.9:0.1").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[2], 6.3);
        assert_eq!(v[8], 6.9);
        assert_eq!(parse_t_values("4.2, 4.5,4.8").unwrap(), vec![4.2, 4.5, 4.8]);
        assert!(parse_t_values("1:0:0.1").is_err());
        assert!(parse_t_values("x").is_err());
    }

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_values("1..8").unwrap(), (1..=8).collect::<Vec<_>>());
        assert_eq!(parse_n_values("2:4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_n_values("3").unwrap(), vec![3]);
        assert!(parse_n_values("4..2").is_err());
    }

    #[test]
    fn methods_are_sorted_and_deduplicated() {
        assert_eq!(parse_methods("coin,RBE,rbe").unwrap(), vec![Method::Rbe, Method::Coin]);
        assert_eq!(parse_methods("nope").unwrap_err().field, "methods");
    }

    #[test]
    fn sweep_validation_names_fields() {
        let s = Settings {
            round_size: Some(5000),
            shots: Some(1000),
            ..Settings::default()
        };
        assert_eq!(SweepConfig::from_settings(&s).unwrap_err().field, "round_size");

        let s = Settings {
            t: Some(ListSpec::Text("8.5".into())),
            ..Settings::default()
        };
        assert_eq!(SweepConfig::from_settings(&s).unwrap_err().field, "t");

        let s = Settings {
            noise: Some(1.5),
            ..Settings::default()
        };
        assert_eq!(SweepConfig::from_settings(&s).unwrap_err().field, "noise");
    }

    #[test]
    fn overlay_prefers_top() {
        let base = Settings {
            shots: Some(10),
            seed: Some(1),
            ..Settings::default()
        };
        let top = Settings {
            seed: Some(2),
            ..Settings::default()
        };
        let merged = base.overlay(top);
        assert_eq!((merged.shots, merged.seed), (Some(10), Some(2)));
    }

    #[test]
    fn config_file_lists_and_strings() {
        let s: Settings = toml::from_str("n = 3\nt = [6.1, 6.2]\nmethods = \"RBE,COIN\"\nround_size = 500").unwrap();
        let c = SweepConfig::from_settings(&s).unwrap();
        assert_eq!(c.t_values, vec![6.1, 6.2]);
        assert_eq!(c.methods, vec![Method::Rbe, Method::Coin]);
        assert_eq!(c.round_size, 500);

        let s: Settings = serde_json::from_str(r#"{"t": "6.1:6.3:0.1", "methods": ["mle"]}"#).unwrap();
        let c = SweepConfig::from_settings(&s).unwrap();
        assert_eq!(c.t_values.len(), 3);
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
    }
}
