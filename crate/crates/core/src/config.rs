//! Flat `key=value` experiment files.
//!
//! ```text
//! # low-noise run
//! alphas = 0, 1/6, 1/3, 1/2
//! eta = 0.9
//! n_steps = 5
//! domain_hi = pi/2
//! ```
//!
//! Reals accept plain decimals, fractions (`1/6`), and multiples of `pi`
//! (`pi/2`, `2*pi`). Lists are comma separated. Unknown keys are rejected.

use std::path::PathBuf;

use crate::bayes::{PhiDomain, DEFAULT_GRID_SIZE};
use crate::ensemble::{default_ensemble_size, SeedSpec, SweepConfig, DEFAULT_CONFIDENCE, DEFAULT_TAU};
use crate::error::{Error, Result};
use crate::quantum::NoiseModel;

pub const DEFAULT_ALPHAS: [f64; 4] = [0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5];
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alphas: Vec<f64>,
    pub eta: f64,
    pub n_steps: u32,
    pub nus: Vec<u64>,
    pub n_e: usize,
    pub n_phi: usize,
    pub grid_size: usize,
    pub y: f64,
    pub tau: f64,
    pub domain: PhiDomain,
    pub seed: u64,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let (n_e, n_phi) = default_ensemble_size(&NoiseModel::noiseless());
        Self {
            alphas: DEFAULT_ALPHAS.to_vec(),
            eta: 1.0,
            n_steps: 1,
            nus: (1..=10).collect(),
            n_e,
            n_phi,
            grid_size: DEFAULT_GRID_SIZE,
            y: DEFAULT_CONFIDENCE,
            tau: DEFAULT_TAU,
            domain: PhiDomain::default(),
            seed: DEFAULT_SEED,
            output_path: PathBuf::from("sweep.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.eta, self.n_steps)
    }

    /// Range checks shared by the file parser and command-line overrides.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("alphas", Value::Reals(self.alphas.clone())),
            ("eta", Value::Real(self.eta)),
            ("n_steps", Value::Int(u64::from(self.n_steps))),
            ("nus", Value::Ints(self.nus.clone())),
            ("n_e", Value::Int(self.n_e as u64)),
            ("n_phi", Value::Int(self.n_phi as u64)),
            ("grid_size", Value::Int(self.grid_size as u64)),
            ("y", Value::Real(self.y)),
            ("tau", Value::Real(self.tau)),
        ];
        for (key, value) in &checks {
            validate_key(key, value).map_err(|m| Error::Argument(format!("{key}: {m}")))?;
        }
        Ok(())
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        self.validate()?;
        let mut cfg = SweepConfig::new(self.alphas.clone(), self.noise()?, SeedSpec::new(self.seed));
        cfg.nus = self.nus.clone();
        cfg.n_e = self.n_e;
        cfg.n_phi = self.n_phi;
        cfg.grid_size = self.grid_size;
        cfg.y = self.y;
        cfg.tau = self.tau;
        cfg.domain = self.domain;
        Ok(cfg)
    }
}

enum Value {
    Real(f64),
    Reals(Vec<f64>),
    Int(u64),
    Ints(Vec<u64>),
}

fn validate_key(key: &str, value: &Value) -> std::result::Result<(), String> {
    let check_unit = |x: f64| {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(format!("{x} is outside the range [0,1]"))
        }
    };
    match (key, value) {
        ("alphas", Value::Reals(v)) => {
            if v.is_empty() {
                return Err("needs at least one value".into());
            }
            v.iter().try_for_each(|&x| check_unit(x))
        }
        ("eta", Value::Real(x)) => check_unit(*x),
        ("y", Value::Real(x)) if !(*x > 0.0 && *x < 1.0) => Err(format!("{x} is outside the range (0,1)")),
        ("tau", Value::Real(x)) if !(*x > 0.0 && *x < 1.0) => Err(format!("{x} is outside the range (0,1)")),
        ("n_steps" | "n_phi", Value::Int(0)) => Err("must be at least 1".into()),
        ("n_e", Value::Int(n)) if *n < 2 => Err(format!("{n} must be at least 2")),
        ("grid_size", Value::Int(n)) if *n < 3 => Err(format!("{n} must be at least 3")),
        ("nus", Value::Ints(v)) if v.is_empty() => Err("needs at least one value".into()),
        _ => Ok(()),
    }
}

/// Parses a real: decimal, `a/b`, or a multiple of `pi` (`pi`, `pi/4`,
/// `3*pi/4`, `-pi`).
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let mut value = 1.0;
    for factor in num.split('*') {
        value *= parse_atom(factor.trim(), text)?;
    }
    if let Some(d) = den {
        let d = parse_atom(d, text)?;
        if d == 0.0 {
            return Err(format!("`{text}` divides by zero"));
        }
        value /= d;
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not a finite number"))
    }
}

fn parse_atom(atom: &str, whole: &str) -> std::result::Result<f64, String> {
    match atom {
        "pi" => Ok(std::f64::consts::PI),
        "-pi" => Ok(-std::f64::consts::PI),
        _ => atom
            .parse::<f64>()
            .map_err(|_| format!("`{whole}` is not a number")),
    }
}

fn parse_uint(text: &str) -> std::result::Result<u64, String> {
    text.trim()
        .parse::<u64>()
        .map_err(|_| format!("`{}` is not a nonnegative integer", text.trim()))
}

fn parse_list<T>(text: &str, item: fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    text.split(',').map(|s| item(s)).collect()
}

/// Parses a config document; omitted keys keep their defaults, and the
/// ensemble size defaults follow the parsed `eta`.
pub fn parse_config(source: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut n_e = None;
    let mut n_phi = None;
    let mut lo = (0usize, cfg.domain.lo());
    let mut hi = (0usize, cfg.domain.hi());

    for (index, raw) in source.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line,
                key: content.to_string(),
                message: "expected `key=value`".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let fail = |message: String| Error::Config {
            line,
            key: key.to_string(),
            message,
        };

        let checked = match key {
            "alphas" => parse_list(value, parse_real).map(|v| {
                cfg.alphas = v.clone();
                Value::Reals(v)
            }),
            "eta" => parse_real(value).map(|v| {
                cfg.eta = v;
                Value::Real(v)
            }),
            "n_steps" => parse_uint(value).and_then(|v| {
                cfg.n_steps = u32::try_from(v).map_err(|_| format!("{v} is too large"))?;
                Ok(Value::Int(v))
            }),
            "nus" => parse_list(value, parse_uint).map(|v| {
                cfg.nus = v.clone();
                Value::Ints(v)
            }),
            "n_e" => parse_uint(value).map(|v| {
                n_e = Some(v as usize);
                Value::Int(v)
            }),
            "n_phi" => parse_uint(value).map(|v| {
                n_phi = Some(v as usize);
                Value::Int(v)
            }),
            "grid_size" => parse_uint(value).map(|v| {
                cfg.grid_size = v as usize;
                Value::Int(v)
            }),
            "y" => parse_real(value).map(|v| {
                cfg.y = v;
                Value::Real(v)
            }),
            "tau" => parse_real(value).map(|v| {
                cfg.tau = v;
                Value::Real(v)
            }),
            "domain_lo" => parse_real(value).map(|v| {
                lo = (line, v);
                Value::Real(v)
            }),
            "domain_hi" => parse_real(value).map(|v| {
                hi = (line, v);
                Value::Real(v)
            }),
            "seed" => parse_uint(value).map(|v| {
                cfg.seed = v;
                Value::Int(v)
            }),
            "output_path" => {
                if value.is_empty() {
                    Err("must not be empty".to_string())
                } else {
                    cfg.output_path = PathBuf::from(value);
                    Ok(Value::Int(0))
                }
            }
            _ => Err("unknown key".to_string()),
        };
        let parsed = checked.map_err(&fail)?;
        validate_key(key, &parsed).map_err(&fail)?;
    }

    let (default_n_e, default_n_phi) = default_ensemble_size(&cfg.noise()?);
    cfg.n_e = n_e.unwrap_or(default_n_e);
    cfg.n_phi = n_phi.unwrap_or(default_n_phi);
    cfg.domain = PhiDomain::new(lo.1, hi.1).map_err(|e| Error::Config {
        line: hi.0.max(lo.0),
        key: if hi.0 >= lo.0 { "domain_hi" } else { "domain_lo" }.into(),
        message: e.to_string(),
    })?;
    Ok(cfg)
}
