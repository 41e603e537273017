//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment. Values are in the units named by
//! the key suffix (dBm, dB, Hz, GHz, W, J) and are converted to SI when the
//! configuration is resolved. Missing keys take the reference defaults;
//! unknown or repeated keys are errors.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{db_to_linear, dbm_to_watt, ChannelGain, HardwareProfile, Limits};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid {key} = {value}: must be {constraint}")]
    Invalid {
        key: &'static str,
        value: String,
        constraint: &'static str,
    },
    #[error("mu_w = {mu} conflicts with p_fix_w + p_syn_w = {sum}")]
    MuConflict { mu: f64, sum: f64 },
    #[error("p_fix_w and p_syn_w must be given together")]
    IncompleteSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Configuration in the units it was written in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kappa: f64,
    pub mu_w: f64,
    /// Optional (P_FIX, P_SYN) split of `mu_w`.
    pub fixed_split_w: Option<(f64, f64)>,
    pub d0_w: f64,
    pub nu_j_per_sample: f64,
    pub eta_j_per_bit: f64,
    pub n0_dbm_per_hz: f64,
    pub beta_db: f64,
    pub p_max_dbm: f64,
    pub b_max_hz: f64,
    pub m_max: u32,
    pub delta_bit_per_j: f64,
    pub format: OutputFormat,
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kappa: 0.4,
            mu_w: 0.1,
            fixed_split_w: None,
            d0_w: 0.02,
            nu_j_per_sample: 1e-10,
            eta_j_per_bit: 1e-11,
            n0_dbm_per_hz: -174.0,
            beta_db: -110.0,
            p_max_dbm: 40.0,
            b_max_hz: 1e10,
            m_max: 512,
            delta_bit_per_j: 0.1,
            format: OutputFormat::Csv,
            output: None,
        }
    }
}

const KEYS: &[&str] = &[
    "kappa",
    "mu_w",
    "p_fix_w",
    "p_syn_w",
    "d0_w",
    "nu_j_per_sample",
    "eta_j_per_bit",
    "n0_dbm_per_hz",
    "beta_db",
    "p_max_dbm",
    "b_max_hz",
    "b_max_ghz",
    "m_max",
    "delta_bit_per_j",
    "format",
    "output",
];

fn invalid(key: &'static str, value: impl ToString, constraint: &'static str) -> ConfigError {
    ConfigError::Invalid {
        key,
        value: value.to_string(),
        constraint,
    }
}

/// Parses a configuration document; values are checked in [`RunConfig::resolve`].
pub fn parse_run_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<&'static str> = Vec::new();
    let (mut mu, mut p_fix, mut p_syn) = (None, None, None);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Parse {
                line,
                column: content.len() - content.trim_start().len() + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        // The GHz alias names the same setting as b_max_hz.
        let canonical = if key == "b_max_ghz" { "b_max_hz" } else { key };
        if seen.contains(&canonical) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen.push(canonical);

        let num = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::Parse {
                    line,
                    column: value_col,
                    message: format!("`{value}` is not a finite number"),
                })
        };
        match key {
            "kappa" => cfg.kappa = num()?,
            "mu_w" => mu = Some(num()?),
            "p_fix_w" => p_fix = Some(num()?),
            "p_syn_w" => p_syn = Some(num()?),
            "d0_w" => cfg.d0_w = num()?,
            "nu_j_per_sample" => cfg.nu_j_per_sample = num()?,
            "eta_j_per_bit" => cfg.eta_j_per_bit = num()?,
            "n0_dbm_per_hz" => cfg.n0_dbm_per_hz = num()?,
            "beta_db" => cfg.beta_db = num()?,
            "p_max_dbm" => cfg.p_max_dbm = num()?,
            "b_max_hz" => cfg.b_max_hz = num()?,
            "b_max_ghz" => cfg.b_max_hz = num()? * 1e9,
            "delta_bit_per_j" => cfg.delta_bit_per_j = num()?,
            "m_max" => {
                cfg.m_max = value.parse().map_err(|_| ConfigError::Parse {
                    line,
                    column: value_col,
                    message: format!("`{value}` is not a positive integer"),
                })?
            }
            "format" => {
                cfg.format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    _ => return Err(invalid("format", value, "csv or json")),
                }
            }
            "output" => cfg.output = Some(value.to_string()),
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    match (mu, p_fix, p_syn) {
        (_, Some(_), None) | (_, None, Some(_)) => return Err(ConfigError::IncompleteSplit),
        (Some(mu), Some(a), Some(b)) if mu != a + b => {
            return Err(ConfigError::MuConflict { mu, sum: a + b })
        }
        (_, Some(a), Some(b)) => {
            cfg.mu_w = a + b;
            cfg.fixed_split_w = Some((a, b));
        }
        (Some(mu), None, None) => cfg.mu_w = mu,
        (None, None, None) => {}
    }
    Ok(cfg)
}

impl RunConfig {
    /// Validates every value and converts to SI domain objects.
    pub fn resolve(&self) -> Result<(HardwareProfile, ChannelGain, Limits), ConfigError> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(invalid("kappa", self.kappa, "in (0, 1]"));
        }
        let non_negative = [
            ("mu_w", self.mu_w),
            ("d0_w", self.d0_w),
            ("nu_j_per_sample", self.nu_j_per_sample),
            ("eta_j_per_bit", self.eta_j_per_bit),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, v, ">= 0"));
            }
        }
        if let Some((a, b)) = self.fixed_split_w {
            if a < 0.0 || b < 0.0 {
                return Err(invalid("p_fix_w", format!("{a}, {b}"), ">= 0"));
            }
        }
        let n0 = dbm_to_watt(self.n0_dbm_per_hz);
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(invalid(
                "n0_dbm_per_hz",
                self.n0_dbm_per_hz,
                "a finite level",
            ));
        }
        let beta = db_to_linear(self.beta_db);
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta_db", self.beta_db, "a finite gain"));
        }
        let p_max = dbm_to_watt(self.p_max_dbm);
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(invalid("p_max_dbm", self.p_max_dbm, "a finite level"));
        }
        if !(self.b_max_hz > 0.0 && self.b_max_hz.is_finite()) {
            return Err(invalid("b_max_hz", self.b_max_hz, "> 0"));
        }
        if self.m_max < 1 {
            return Err(invalid("m_max", self.m_max, ">= 1"));
        }
        if !(self.delta_bit_per_j > 0.0 && self.delta_bit_per_j.is_finite()) {
            return Err(invalid("delta_bit_per_j", self.delta_bit_per_j, "> 0"));
        }

        let hw = HardwareProfile {
            kappa: self.kappa,
            mu: self.mu_w,
            d0: self.d0_w,
            nu: self.nu_j_per_sample,
            eta: self.eta_j_per_bit,
            n0,
        };
        let limits = Limits {
            p_max,
            b_max: self.b_max_hz,
            m_max: self.m_max,
            delta: self.delta_bit_per_j,
        };
        Ok((hw, ChannelGain { beta }, limits))
    }
}

/// Parses and resolves a configuration document.
pub fn load_config(text: &str) -> Result<(HardwareProfile, ChannelGain, Limits), ConfigError> {
    parse_run_config(text)?.resolve()
}

/// Writes `cfg` back out; [`parse_run_config`] reproduces it exactly.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("kappa", format!("{:?}", cfg.kappa));
    match cfg.fixed_split_w {
        Some((a, b)) => {
            kv("p_fix_w", format!("{a:?}"));
            kv("p_syn_w", format!("{b:?}"));
        }
        None => kv("mu_w", format!("{:?}", cfg.mu_w)),
    }
    kv("d0_w", format!("{:?}", cfg.d0_w));
    kv("nu_j_per_sample", format!("{:?}", cfg.nu_j_per_sample));
    kv("eta_j_per_bit", format!("{:?}", cfg.eta_j_per_bit));
    kv("n0_dbm_per_hz", format!("{:?}", cfg.n0_dbm_per_hz));
    kv("beta_db", format!("{:?}", cfg.beta_db));
    kv("p_max_dbm", format!("{:?}", cfg.p_max_dbm));
    kv("b_max_hz", format!("{:?}", cfg.b_max_hz));
    kv("m_max", cfg.m_max.to_string());
    kv("delta_bit_per_j", format!("{:?}", cfg.delta_bit_per_j));
    kv(
        "format",
        match cfg.format {
            OutputFormat::Csv => "csv".into(),
            OutputFormat::Json => "json".into(),
        },
    );
    if let Some(path) = &cfg.output {
        kv("output", path.clone());
    }
    out
}
