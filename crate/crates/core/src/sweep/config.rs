use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::is_prime;
use crate::rational::ExactRational;

use super::SweepError;

/// Primes as an explicit list or an inclusive range `{"from": a, "to": b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeSet {
    List(Vec<u64>),
    Range { from: u64, to: u64 },
}

impl PrimeSet {
    /// Sorted, deduplicated primes; errors on a listed non-prime.
    pub fn resolve(&self) -> Result<Vec<u64>, SweepError> {
        let mut primes = match self {
            Self::List(list) => {
                if let Some(&bad) = list.iter().find(|&&p| !is_prime(p)) {
                    return Err(SweepError::Config(format!("{bad} is not prime")));
                }
                list.clone()
            }
            Self::Range { from, to } => (*from..=*to).filter(|&p| is_prime(p)).collect(),
        };
        primes.sort_unstable();
        primes.dedup();
        if primes.is_empty() {
            return Err(SweepError::Config("no primes selected".into()));
        }
        Ok(primes)
    }
}

/// Largest exponent per prime: a fixed number, or `"budget"` to go as far
/// as the row budget allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EMax {
    Fixed(u32),
    Budget,
}

impl Default for EMax {
    fn default() -> Self {
        Self::Fixed(2)
    }
}

impl Serialize for EMax {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Fixed(e) => serializer.serialize_u32(*e),
            Self::Budget => serializer.serialize_str("budget"),
        }
    }
}

impl<'de> Deserialize<'de> for EMax {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(e) => Ok(Self::Fixed(e)),
            Raw::Text(t) if t == "budget" => Ok(Self::Budget),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "e_max must be a number or \"budget\", got {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

fn default_vars() -> String {
    "x,y,z".into()
}

fn default_residue_modulus() -> u64 {
    9
}

fn default_row_budget() -> Option<u64> {
    Some(DEFAULT_ROW_BUDGET)
}

/// Default cap on the estimated rows of one degree-scan matrix.
pub const DEFAULT_ROW_BUDGET: u64 = 20_000;

/// Hard ceiling on `e` in budget mode.
pub const BUDGET_E_CEILING: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub curve: String,
    #[serde(default = "default_vars")]
    pub vars: String,
    /// Ideal generators; the variables when absent.
    #[serde(default)]
    pub ideal: Option<Vec<String>>,
    pub primes: PrimeSet,
    #[serde(default)]
    pub e_max: EMax,
    /// `None` disables the budget.
    #[serde(default = "default_row_budget")]
    pub row_budget: Option<u64>,
    #[serde(default = "default_residue_modulus")]
    pub residue_modulus: u64,
    /// Characteristic-0 value the gaps are measured against; defaults to
    /// the strongly semistable value for plane curves.
    #[serde(default)]
    pub char0: Option<ExactRational>,
    #[serde(default)]
    pub cache_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn new(curve: impl Into<String>, primes: PrimeSet) -> Self {
        Self {
            curve: curve.into(),
            vars: default_vars(),
            ideal: None,
            primes,
            e_max: EMax::default(),
            row_budget: default_row_budget(),
            residue_modulus: default_residue_modulus(),
            char0: None,
            cache_path: None,
            format: OutputFormat::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        serde_json::from_str(text).map_err(|e| SweepError::Config(e.to_string()))
    }

    pub(crate) fn validate(&self) -> Result<(), SweepError> {
        if self.e_max == EMax::Fixed(0) {
            return Err(SweepError::Config("e_max must be at least 1".into()));
        }
        if self.e_max == EMax::Budget && self.row_budget.is_none() {
            return Err(SweepError::Config("e_max = \"budget\" needs a row_budget".into()));
        }
        if self.residue_modulus < 2 {
            return Err(SweepError::Config("residue_modulus must be at least 2".into()));
        }
        if matches!(&self.ideal, Some(gens) if gens.is_empty()) {
            return Err(SweepError::Config("ideal needs at least one generator".into()));
        }
        Ok(())
    }

    pub(crate) fn exponent_ceiling(&self) -> u32 {
        match self.e_max {
            EMax::Fixed(e) => e,
            EMax::Budget => BUDGET_E_CEILING,
        }
    }
}
