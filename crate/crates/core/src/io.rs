//! JSON documents exchanged with the command line and Python front ends.
//!
//! Words use their textual form (`"e"`, `"1 2 1"`), coset labels their bit
//! strings (`"110"`), and couplings are rational strings (`"-1"`, `"3/2"`).

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic_subgroups::{CosetColoring, CosetLabel, SubgroupSpec};
use crate::spin_config::{ModelParams, SpinConfiguration};
use crate::tree_group::{TreeParams, Word};

pub fn parse_coupling(text: &str) -> Result<BigRational> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Parse(format!("bad coupling {text:?}: {e}")))
}

/// `{"k":2, "r":2, "q":3, "J":"-1", "n":2, "values":{"e":1, "1":2, ...}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub k: u32,
    pub r: u32,
    pub q: u32,
    #[serde(rename = "J")]
    pub j: String,
    pub n: usize,
    pub values: BTreeMap<String, u32>,
}

impl ConfigFile {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.k, self.r, self.q, parse_coupling(&self.j)?)
    }

    /// Words must already be reduced and distinct.
    pub fn configuration(&self) -> Result<SpinConfiguration> {
        let tree = TreeParams::new(self.k)?;
        let mut values = BTreeMap::new();
        for (text, &spin) in &self.values {
            let w = Word::parse(text, tree)?;
            let letter_count = if text.trim() == "e" {
                0
            } else {
                text.split_whitespace().count()
            };
            if w.len() != letter_count {
                return Err(Error::Parse(format!("word {text:?} is not reduced")));
            }
            if spin == 0 || spin > self.q {
                return Err(Error::InvalidSpin { spin, q: self.q });
            }
            if values.insert(w, spin).is_some() {
                return Err(Error::Parse(format!("duplicate vertex {text:?}")));
            }
        }
        SpinConfiguration::new(tree, values)
    }

    pub fn from_parts(params: &ModelParams, n: usize, config: &SpinConfiguration) -> Self {
        Self {
            k: params.k(),
            r: params.r(),
            q: params.q(),
            j: params.j().to_string(),
            n,
            values: config
                .values()
                .iter()
                .map(|(w, &s)| (w.to_string(), s))
                .collect(),
        }
    }
}

/// `{"m":3, "k":3, "A":[[1,4],[2,4],[3,4]]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub m: u32,
    pub k: u32,
    #[serde(rename = "A")]
    pub a_sets: Vec<Vec<u32>>,
}

impl SpecFile {
    pub fn spec(&self) -> Result<SubgroupSpec> {
        SubgroupSpec::from_a_sets(self.k, self.m, self.a_sets.clone())
    }
}

impl From<&SubgroupSpec> for SpecFile {
    fn from(spec: &SubgroupSpec) -> Self {
        Self {
            m: spec.m(),
            k: spec.k(),
            a_sets: spec.a_sets().to_vec(),
        }
    }
}

/// `{"m":3, "colors":{"000":1, "100":2, ...}}`, total on all `2^m` labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFile {
    pub m: u32,
    pub colors: BTreeMap<String, u32>,
}

impl ColoringFile {
    pub fn coloring(&self) -> Result<CosetColoring> {
        let size = 1usize
            .checked_shl(self.m)
            .filter(|_| self.m <= 24)
            .ok_or_else(|| Error::Unsupported(format!("coloring with m = {}", self.m)))?;
        let mut colors = vec![0u32; size];
        for (text, &spin) in &self.colors {
            let label = CosetLabel::parse(text)?;
            if label.m() != self.m {
                return Err(Error::Parse(format!(
                    "label {text:?} is not {} bits",
                    self.m
                )));
            }
            colors[label.bits() as usize] = spin;
        }
        if let Some(missing) = colors.iter().position(|&c| c == 0) {
            return Err(Error::Parse(format!(
                "no color for label {}",
                CosetLabel::new(self.m, missing as u64)?
            )));
        }
        CosetColoring::new(self.m, colors)
    }
}

impl From<&CosetColoring> for ColoringFile {
    fn from(c: &CosetColoring) -> Self {
        Self {
            m: c.m(),
            colors: c
                .colors()
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    (
                        CosetLabel::new(c.m(), i as u64)
                            .expect("label in range")
                            .to_string(),
                        s,
                    )
                })
                .collect(),
        }
    }
}
