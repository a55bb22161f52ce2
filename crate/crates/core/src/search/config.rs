use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fitness::FitnessParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Elitism,
    Roulette,
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "elitism" => Ok(Selection::Elitism),
            "roulette" | "roulettewheel" | "roulette-wheel" => Ok(Selection::Roulette),
            other => Err(format!("unknown selection algorithm `{other}`")),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Elitism => "elitism",
            Selection::Roulette => "roulette",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Search parameters. Times are in seconds; `f64::INFINITY` disables a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Crossover rate.
    pub cr: f64,
    /// Per-slot mutation rate.
    pub mr: f64,
    /// Population size.
    pub ps: usize,
    pub sa: Selection,
    /// Elitism pool size.
    pub ptbc: usize,
    /// Number of satisfied mutants after which the search stops.
    pub mg: usize,
    /// Tournament size; accepted for completeness, unused.
    pub ts: usize,
    /// Per-check time budget.
    pub tcto: f64,
    /// Whole-search time budget.
    pub pgto: f64,
    pub seed: u64,
    pub max_generations: Option<u64>,
    pub include_unknown: bool,
    pub fitness: FitnessParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cr: 0.95,
            mr: 0.90,
            ps: 50,
            sa: Selection::Roulette,
            ptbc: 10,
            mg: 1000,
            ts: 50,
            tcto: 3600.0,
            pgto: 432_000.0,
            seed: 0,
            max_generations: None,
            include_unknown: false,
            fitness: FitnessParams::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "cr",
    "mr",
    "ps",
    "sa",
    "ptbc",
    "mg",
    "ts",
    "tcto",
    "pgto",
    "seed",
    "max-generations",
    "include-unknown",
    "match",
    "mismatch",
    "gap",
];

impl Config {
    /// Desk-scale profile: defaults with MG 100 and PS 20.
    pub fn desk() -> Self {
        Config { mg: 100, ps: 20, ..Config::default() }
    }

    pub fn tcto_budget(&self) -> Option<Duration> {
        seconds(self.tcto)
    }

    pub fn pgto_budget(&self) -> Option<Duration> {
        seconds(self.pgto)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if !(0.0..=1.0).contains(&self.cr) {
            return bad("cr must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mr) {
            return bad("mr must lie in [0, 1]");
        }
        if self.ps == 0 || self.ptbc == 0 || self.mg == 0 || self.ts == 0 {
            return bad("ps, ptbc, mg and ts must be positive");
        }
        if self.ptbc > self.ps {
            return bad("ptbc must not exceed ps");
        }
        if self.tcto.is_nan() || self.tcto < 0.0 || self.pgto.is_nan() || self.pgto < 0.0 {
            return bad("tcto and pgto must be non-negative");
        }
        if self.max_generations == Some(0) {
            return bad("max-generations must be positive");
        }
        let p = &self.fitness;
        if ![p.match_score, p.mismatch, p.gap].iter().all(|x| x.is_finite()) {
            return bad("fitness scores must be finite");
        }
        Ok(())
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let bad = |msg: String| ConfigError::BadValue { key: key.clone(), msg };
        fn num<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("`{v}`: {e}"))
        }
        fn secs(v: &str) -> Result<f64, String> {
            if matches!(v, "inf" | "none") {
                return Ok(f64::INFINITY);
            }
            num::<f64>(v)
        }
        match key.as_str() {
            "cr" => self.cr = num(value).map_err(bad)?,
            "mr" => self.mr = num(value).map_err(bad)?,
            "ps" => self.ps = num(value).map_err(bad)?,
            "sa" => self.sa = value.parse().map_err(bad)?,
            "ptbc" => self.ptbc = num(value).map_err(bad)?,
            "mg" => self.mg = num(value).map_err(bad)?,
            "ts" => self.ts = num(value).map_err(bad)?,
            "tcto" => self.tcto = secs(value).map_err(bad)?,
            "pgto" => self.pgto = secs(value).map_err(bad)?,
            "seed" => self.seed = num(value).map_err(bad)?,
            "max-generations" => {
                self.max_generations = if value == "none" { None } else { Some(num(value).map_err(bad)?) }
            }
            "include-unknown" => self.include_unknown = num(value).map_err(bad)?,
            "match" => self.fitness.match_score = num(value).map_err(bad)?,
            "mismatch" => self.fitness.mismatch = num(value).map_err(bad)?,
            "gap" => self.fitness.gap = num(value).map_err(bad)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Apply a `key = value` document on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: n + 1, msg: "expected `key = value`".into() })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Parse a configuration document over the defaults and validate it.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Render as a document that [`Config::parse`] reads back to `self`.
    pub fn to_text(&self) -> String {
        let secs = |x: f64| if x.is_infinite() { "inf".to_string() } else { x.to_string() };
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("cr", self.cr.to_string());
        kv("mr", self.mr.to_string());
        kv("ps", self.ps.to_string());
        kv("sa", self.sa.to_string());
        kv("ptbc", self.ptbc.to_string());
        kv("mg", self.mg.to_string());
        kv("ts", self.ts.to_string());
        kv("tcto", secs(self.tcto));
        kv("pgto", secs(self.pgto));
        kv("seed", self.seed.to_string());
        kv(
            "max-generations",
            self.max_generations.map_or_else(|| "none".to_string(), |g| g.to_string()),
        );
        kv("include-unknown", self.include_unknown.to_string());
        kv("match", self.fitness.match_score.to_string());
        kv("mismatch", self.fitness.mismatch.to_string());
        kv("gap", self.fitness.gap.to_string());
        out
    }
}

fn seconds(x: f64) -> Option<Duration> {
    if x.is_finite() {
        Duration::try_from_secs_f64(x).ok()
    } else {
        None
    }
}
