//! Serializable descriptions of systems and measures, as they appear in
//! experiment files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measures::{BernoulliMeasure, MarkovMeasure, Measure, ProductMeasure};
use crate::space::{Alphabet, Indexing, Word};
use crate::systems::{CaRule, Odometer, Rotation, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sided {
    One,
    Two,
}

impl From<Sided> for Indexing {
    fn from(s: Sided) -> Indexing {
        match s {
            Sided::One => Indexing::OneSided,
            Sided::Two => Indexing::TwoSided,
        }
    }
}

fn binary() -> usize {
    2
}

fn two_sided() -> Sided {
    Sided::Two
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemConfig {
    Eca {
        rule: u8,
    },
    Ca {
        radius: usize,
        /// Neighbourhood word to image symbol.
        table: BTreeMap<String, u8>,
        #[serde(default = "two_sided")]
        sided: Sided,
        #[serde(default = "binary")]
        alphabet: usize,
    },
    Shift {
        #[serde(default = "binary")]
        alphabet: usize,
    },
    Odometer {
        sizes: Vec<usize>,
    },
    Rotation {
        alpha: f64,
    },
}

impl SystemConfig {
    pub fn build(&self) -> Result<System> {
        Ok(match self {
            SystemConfig::Eca { rule } => System::Ca(CaRule::elementary(*rule)),
            SystemConfig::Ca {
                radius,
                table,
                sided,
                alphabet,
            } => {
                let alphabet = Alphabet::new(*alphabet)?;
                let indexing = Indexing::from(*sided);
                let cells = indexing.window_len(*radius);
                let mut parsed = BTreeMap::new();
                for (key, &image) in table {
                    let word = Word::parse(key, alphabet)?;
                    if word.len() != cells {
                        return invalid(format!("table key {key:?} is not a neighbourhood of {cells} cells"));
                    }
                    parsed.insert(word.0, image);
                }
                let total = (alphabet.size() as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
                if parsed.len() as u128 != total {
                    return invalid(format!("table must list all {total} neighbourhoods"));
                }
                System::Ca(CaRule::from_fn(alphabet, indexing, *radius, |nbhd| parsed[nbhd])?)
            }
            SystemConfig::Shift { alphabet } => System::Shift(Alphabet::new(*alphabet)?),
            SystemConfig::Odometer { sizes } => System::Odometer(Odometer::new(sizes.clone())?),
            SystemConfig::Rotation { alpha } => System::Rotation(Rotation::new(*alpha)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureConfig {
    Bernoulli {
        weights: Vec<f64>,
    },
    Markov {
        #[serde(rename = "P")]
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pi: Option<Vec<f64>>,
    },
    Haar {
        sizes: Vec<usize>,
    },
    Lebesgue,
}

impl MeasureConfig {
    pub fn build(&self) -> Result<Measure> {
        Ok(match self {
            MeasureConfig::Bernoulli { weights } => Measure::Bernoulli(BernoulliMeasure::new(weights.clone())?),
            MeasureConfig::Markov { transition, pi } => {
                Measure::Markov(MarkovMeasure::new(transition.clone(), pi.clone())?)
            }
            MeasureConfig::Haar { sizes } => Measure::Haar(ProductMeasure::new(sizes.clone())?),
            MeasureConfig::Lebesgue => Measure::Lebesgue,
        })
    }
}
