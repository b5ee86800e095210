use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::adversary::{default_fraction, StrategySpec};
use crate::codes::{derive_params, ProtocolParams, Rational};

use super::HarnessError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// One batch of trials against one strategy, e.g.
///
/// ```json
/// {"n": 64, "epsilon": "1/10", "strategy": {"kind": "IidRate", "rate": 0.3}, "trials": 10}
/// ```
///
/// Rationals may be written as `"a/b"`, as decimal strings or as numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(with = "rational_serde")]
    pub epsilon: Rational,
    pub strategy: StrategySpec,
    /// Fraction of all bits the adversary may erase; `6/11 − slack·ε` if absent.
    #[serde(
        default,
        with = "rational_serde::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub budget_fraction: Option<Rational>,
    #[serde(default = "default_slack", with = "rational_serde")]
    pub slack: Rational,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Where metrics go; stdout if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Directory receiving one JSON-lines transcript per trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript_dir: Option<PathBuf>,
}

fn default_slack() -> Rational {
    Rational::from_integer(4)
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(n: usize, epsilon: Rational, strategy: StrategySpec) -> Self {
        Self {
            n,
            epsilon,
            strategy,
            budget_fraction: None,
            slack: default_slack(),
            trials: 1,
            seed: 0,
            output_path: None,
            format: OutputFormat::Json,
            transcript_dir: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Derives the protocol parameters, rejecting configs that cannot run.
    pub fn validate(&self) -> Result<ProtocolParams, HarnessError> {
        let params = derive_params(self.n, self.epsilon)?;
        if self.fraction() > Rational::from_integer(1) {
            return Err(HarnessError::Config("budget fraction above 1".into()));
        }
        if let StrategySpec::IidRate { rate } = self.strategy {
            if !(0.0..=1.0).contains(&rate) {
                return Err(HarnessError::Config(format!(
                    "erasure rate {rate} outside [0, 1]"
                )));
            }
        }
        Ok(params)
    }

    pub fn fraction(&self) -> Rational {
        self.budget_fraction
            .unwrap_or_else(|| default_fraction(self.epsilon, self.slack))
    }
}

pub(crate) mod rational_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::codes::{format_rational, parse_rational, Rational};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Int(u64),
        Float(f64),
    }

    fn from_raw<E: Error>(raw: Raw) -> Result<Rational, E> {
        let text = match raw {
            Raw::Text(s) => s,
            Raw::Int(v) => return Ok(Rational::from_integer(v)),
            Raw::Float(f) => f.to_string(),
        };
        parse_rational(&text).map_err(E::custom)
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => super::serialize(r, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<Raw>::deserialize(d)?.map(from_raw).transpose()
        }
    }
}
