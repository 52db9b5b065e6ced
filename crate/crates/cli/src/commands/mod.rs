//! Subcommand implementations.

pub mod moments;
pub mod pde;
pub mod simulate;
pub mod stationary;

use std::fmt;
use std::str::FromStr;

use free_jacobi_core::moments::{initial_moments, Start};
use free_jacobi_core::stationary::stationary_moments;
use free_jacobi_core::JacobiParams;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{CliError, Result};

/// What a command hands back to the driver.
pub struct Report {
    /// Health counters and fallback flags for the manifest.
    pub health: Value,
    /// Human-readable summary printed on completion.
    pub summary: String,
    /// A regime violation detected after all outputs were written.
    pub domain_error: Option<String>,
}

/// First non-empty of a flag, a config-file value and a default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`pick`] for values that have no default.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file).ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

pub fn params(lambda: f64, theta: f64) -> Result<JacobiParams> {
    JacobiParams::new(lambda, theta).map_err(|e| CliError::Usage(e.to_string()))
}

/// Initial spectral data for the deterministic commands:
/// `stationary`, `scalar:C` (`J₀ = cP`) or `identity` (`J₀ = P`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StartSpec {
    Stationary,
    Scalar(f64),
    Identity,
}

impl FromStr for StartSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "stationary" => Ok(StartSpec::Stationary),
            "identity" => Ok(StartSpec::Identity),
            _ => {
                let c = s
                    .strip_prefix("scalar:")
                    .ok_or_else(|| format!("unknown start '{s}' (stationary, identity, scalar:C)"))?;
                let c: f64 = c.parse().map_err(|_| format!("bad scalar in start '{s}'"))?;
                if !(c > 0.0 && c < 1.0) {
                    return Err(format!("scalar start needs 0 < C < 1, got {c}"));
                }
                Ok(StartSpec::Scalar(c))
            }
        }
    }
}

impl fmt::Display for StartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartSpec::Stationary => write!(f, "stationary"),
            StartSpec::Identity => write!(f, "identity"),
            StartSpec::Scalar(c) => write!(f, "scalar:{c:?}"),
        }
    }
}

impl Serialize for StartSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StartSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl StartSpec {
    /// `m₀ … m_N` of the start.
    pub fn moments(&self, p: &JacobiParams, order: usize) -> Result<Vec<f64>> {
        Ok(match *self {
            StartSpec::Stationary => stationary_moments(p, order)?.into_iter().map(|s| s.value).collect(),
            StartSpec::Scalar(c) => initial_moments(p, &Start::Scalar(c), order)?,
            StartSpec::Identity => vec![1.0; order + 1],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_specs_round_trip() {
        for s in ["stationary", "identity", "scalar:0.25"] {
            assert_eq!(s.parse::<StartSpec>().unwrap().to_string(), s);
        }
        assert!("scalar:1.5".parse::<StartSpec>().is_err());
        assert!("haar".parse::<StartSpec>().is_err());
    }
}
