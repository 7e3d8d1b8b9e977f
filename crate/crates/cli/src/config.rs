//! Scenario files: flat `key = value` text with `#` comments.
//!
//! ```text
//! p1.tx_power_dbm = 20
//! p1.intra_distance_m = 10
//! p1.si_attenuation_db = 50
//! p2.tx_power_dbm = 20
//! p2.intra_distance_m = 10
//! p2.si_attenuation_db = 50
//! separation_m = 20
//! path_loss_exp = 4
//! sir_threshold_linear = 3
//! ```
//!
//! Each pair gives its power and attenuation either in dB or linear. The SIR
//! threshold comes from `sir_threshold_db`, `sir_threshold_linear` or
//! `rate_bps_hz`; when more than one is given they must agree.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fdd2d_core::{db_to_linear, theta_from_rate, PairConfig, Scenario};
use thiserror::Error;

/// Relative tolerance when several SIR threshold keys are present.
pub const THETA_AGREEMENT: f64 = 1e-9;

const THETA_KEYS: [&str; 3] = ["sir_threshold_db", "sir_threshold_linear", "rate_bps_hz"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: `{key}` is set twice")]
    DuplicateKey { key: String, line: usize },
    #[error("`{key}`: `{value}` is not a finite number")]
    NotANumber { key: String, value: String },
    #[error("missing `{0}`")]
    Missing(String),
    #[error("`{first}` and `{second}` are mutually exclusive")]
    Exclusive { first: String, second: String },
    #[error("`{key}` = {value}: {requirement}")]
    Invalid {
        key: String,
        value: f64,
        requirement: &'static str,
    },
    #[error("`{first}` gives threshold {theta_first} but `{second}` gives {theta_second}")]
    ThresholdMismatch {
        first: &'static str,
        second: &'static str,
        theta_first: f64,
        theta_second: f64,
    },
}

type Result<T> = std::result::Result<T, ConfigError>;

fn known_key(key: &str) -> bool {
    const PAIR: [&str; 5] = [
        "tx_power_dbm",
        "tx_power_linear",
        "intra_distance_m",
        "si_attenuation_db",
        "si_attenuation_linear",
    ];
    if let Some(rest) = key.strip_prefix("p1.").or_else(|| key.strip_prefix("p2.")) {
        return PAIR.contains(&rest);
    }
    key == "separation_m" || key == "path_loss_exp" || THETA_KEYS.contains(&key)
}

struct Entries(BTreeMap<String, f64>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !known_key(key) {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                    line,
                });
            }
            let number = value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::NotANumber {
                    key: key.to_string(),
                    value: value.to_string(),
                })?;
            if map.insert(key.to_string(), number).is_some() {
                return Err(ConfigError::DuplicateKey {
                    key: key.to_string(),
                    line,
                });
            }
        }
        Ok(Entries(map))
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    /// Exactly one of a dB key and a linear key.
    fn either(&self, db_key: &str, linear_key: &str) -> Result<(String, f64)> {
        match (self.get(db_key), self.get(linear_key)) {
            (Some(_), Some(_)) => Err(ConfigError::Exclusive {
                first: db_key.to_string(),
                second: linear_key.to_string(),
            }),
            (Some(db), None) => Ok((db_key.to_string(), db_to_linear(db))),
            (None, Some(lin)) => Ok((linear_key.to_string(), lin)),
            (None, None) => Err(ConfigError::Missing(format!("{db_key} or {linear_key}"))),
        }
    }
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::Invalid {
            key: key.to_string(),
            value,
            requirement: "must be positive",
        })
    }
}

fn pair(entries: &Entries, prefix: &str) -> Result<PairConfig> {
    let (power_key, tx_power) = entries.either(
        &format!("{prefix}.tx_power_dbm"),
        &format!("{prefix}.tx_power_linear"),
    )?;
    let distance_key = format!("{prefix}.intra_distance_m");
    let (si_key, si_attenuation) = entries.either(
        &format!("{prefix}.si_attenuation_db"),
        &format!("{prefix}.si_attenuation_linear"),
    )?;
    Ok(PairConfig {
        tx_power: positive(&power_key, tx_power)?,
        intra_distance: positive(&distance_key, entries.require(&distance_key)?)?,
        si_attenuation: positive(&si_key, si_attenuation)?,
    })
}

fn threshold(entries: &Entries) -> Result<f64> {
    let mut found: Vec<(&'static str, f64)> = Vec::new();
    for key in THETA_KEYS {
        let Some(value) = entries.get(key) else {
            continue;
        };
        let theta = match key {
            "sir_threshold_db" => db_to_linear(value),
            "sir_threshold_linear" => value,
            _ => theta_from_rate(value).map_err(|_| ConfigError::Invalid {
                key: key.to_string(),
                value,
                requirement: "must be non-negative",
            })?,
        };
        positive(key, theta).map_err(|_| ConfigError::Invalid {
            key: key.to_string(),
            value,
            requirement: "must give a positive SIR threshold",
        })?;
        found.push((key, theta));
    }
    let Some(&(first, theta)) = found.first() else {
        return Err(ConfigError::Missing(THETA_KEYS.join(" | ")));
    };
    for &(second, other) in &found[1..] {
        if (theta - other).abs() > THETA_AGREEMENT * theta.abs().max(other.abs()) {
            return Err(ConfigError::ThresholdMismatch {
                first,
                second,
                theta_first: theta,
                theta_second: other,
            });
        }
    }
    Ok(theta)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let entries = Entries::parse(text)?;
    let pair1 = pair(&entries, "p1")?;
    let pair2 = pair(&entries, "p2")?;
    let separation = positive("separation_m", entries.require("separation_m")?)?;
    let path_loss_exp = entries.require("path_loss_exp")?;
    if path_loss_exp < 2.0 {
        return Err(ConfigError::Invalid {
            key: "path_loss_exp".to_string(),
            value: path_loss_exp,
            requirement: "must be at least 2",
        });
    }
    let sir_threshold = threshold(&entries)?;
    Ok(Scenario {
        pair1,
        pair2,
        separation,
        path_loss_exp,
        sir_threshold,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}
