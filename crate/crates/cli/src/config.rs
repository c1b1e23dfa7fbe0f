// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` experiment files.
//!
//! Blank lines, `#` comments and `[section]` headers are ignored. Every problem is
//! reported as a [`ConfigError`] naming the offending field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use dapt_core::dapt::MAX_ORDER_CAP;
use dapt_core::experiment::{Model, Settings};
use dapt_core::models::{FourLevelModel, QuadraticModel};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "b",
    "w",
    "theta",
    "E0",
    "lambda",
    "theta0",
    "v",
    "hbar",
    "n_steps",
    "p_max",
    "margin",
    "null_tol",
    "deg_tol",
    "output",
    "w_equals_v",
    "oracle_steps",
];

/// Raw key/value pairs, kept in text form so sweeps can override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(line, format!("line {} is not `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::new(key, "unknown key"));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::new(key, "given more than once"));
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| ConfigError::new(key, format!("`{s}` is not a finite number")))
            })
            .transpose()
    }

    fn required(&self, key: &str) -> Result<f64, ConfigError> {
        self.real(key)?
            .ok_or_else(|| ConfigError::new(key, "missing"))
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.real(key)? {
            Some(x) if x <= 0.0 => Err(ConfigError::new(key, format!("must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|s| {
                s.parse::<usize>().map_err(|_| {
                    ConfigError::new(key, format!("`{s}` is not a non-negative integer"))
                })
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(false),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(s) => Err(ConfigError::new(key, format!("`{s}` is not true or false"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub model: Model,
    pub settings: Settings,
    pub output: Option<PathBuf>,
}

/// Checks every field and builds the model and run settings.
pub fn resolve(raw: &RawConfig) -> Result<Experiment, ConfigError> {
    let hbar = raw.positive("hbar")?.unwrap_or(1.0);
    let v = raw
        .positive("v")?
        .ok_or_else(|| ConfigError::new("v", "missing"))?;
    let w = if raw.flag("w_equals_v")? {
        if raw.get("w").is_some() {
            return Err(ConfigError::new(
                "w",
                "cannot be set together with w_equals_v = true",
            ));
        }
        v
    } else {
        raw.required("w")?
    };

    let model = match raw.get("model") {
        Some("four_level") => {
            for key in ["E0", "lambda", "theta0"] {
                if raw.get(key).is_some() {
                    return Err(ConfigError::new(key, "not a four_level parameter"));
                }
            }
            let b = raw
                .positive("b")?
                .ok_or_else(|| ConfigError::new("b", "missing"))?;
            let theta = raw.required("theta")?;
            if w < 0.0 {
                return Err(ConfigError::new(
                    "w",
                    format!("must be non-negative, got {w}"),
                ));
            }
            if !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(ConfigError::new(
                    "theta",
                    format!("must lie in [0, pi], got {theta}"),
                ));
            }
            let m = FourLevelModel::new(b, w, theta, hbar, v)
                .map_err(|e| ConfigError::new("model", e.to_string()))?;
            Model::FourLevel(m)
        }
        Some("quadratic") => {
            for key in ["b", "theta"] {
                if raw.get(key).is_some() {
                    return Err(ConfigError::new(key, "not a quadratic parameter"));
                }
            }
            let e0 = raw
                .positive("E0")?
                .ok_or_else(|| ConfigError::new("E0", "missing"))?;
            let lambda = raw.real("lambda")?.unwrap_or(0.0);
            if lambda < 0.0 {
                return Err(ConfigError::new(
                    "lambda",
                    format!("must be non-negative, got {lambda}"),
                ));
            }
            let theta0 = raw.required("theta0")?;
            let m = QuadraticModel::new(e0, lambda, theta0, w, v, hbar)
                .map_err(|e| ConfigError::new("model", e.to_string()))?;
            Model::Quadratic(m)
        }
        Some(other) => {
            return Err(ConfigError::new(
                "model",
                format!("`{other}` is not four_level or quadratic"),
            ))
        }
        None => return Err(ConfigError::new("model", "missing")),
    };

    let mut settings = Settings::default();
    if let Some(n) = raw.count("n_steps")? {
        if n < 16 || n % 2 != 0 {
            return Err(ConfigError::new(
                "n_steps",
                format!("must be even and at least 16, got {n}"),
            ));
        }
        settings.n_steps = n;
    }
    if let Some(p) = raw.count("p_max")? {
        if p > MAX_ORDER_CAP {
            return Err(ConfigError::new(
                "p_max",
                format!("{p} exceeds the cap {MAX_ORDER_CAP}"),
            ));
        }
        settings.p_max = p;
    }
    if let Some(n) = raw.count("oracle_steps")? {
        if n < 2 {
            return Err(ConfigError::new("oracle_steps", "must be at least 2"));
        }
        settings.oracle_steps = n;
    }
    if let Some(x) = raw.positive("margin")? {
        settings.margin = x;
    }
    if let Some(x) = raw.positive("null_tol")? {
        settings.null_tol = x;
    }
    settings.deg_tol = raw.positive("deg_tol")?;

    Ok(Experiment {
        model,
        settings,
        output: raw.get("output").map(PathBuf::from),
    })
}
