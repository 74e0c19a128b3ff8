//! k-XORSAT instances and their random models.
//!
//! Three models are provided:
//! - unconstrained: each equation picks `k` distinct variables uniformly;
//! - constrained: uniform over 0-1 matrices with row sums `k` and all column
//!   sums at least two, sampled by rejection from the chip model;
//! - relaxed chip model: labelled chips dropped into an `m × n` array so that
//!   every row holds `k` chips and every column at least two.

mod codec;
mod enumerate;
mod gen;

pub use codec::{decode_binary, encode_binary, BINARY_MAGIC, BINARY_VERSION};
pub use enumerate::{
    count_c_asymptotic_ln, count_c_exact, enumerate_c_model, enumerate_constrained, CCount,
    ENUMERATION_LIMIT, LOG_CHIP_LIMIT,
};
pub use gen::{
    collision_count, constrained_from, gen_c_model, gen_constrained, gen_unconstrained, sample_truncated_poisson,
    CModelSampler, ChipAllocation, DegreeStrategy, ExcessTable, DEFAULT_REJECTION_BUDGET,
};

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::gf2::BitMatrix;
use crate::rng::Seed;

/// Which random model produced an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Unconstrained,
    Constrained,
    #[serde(rename = "relaxed_c")]
    RelaxedC,
}

impl ModelTag {
    pub(crate) fn code(self) -> u8 {
        match self {
            ModelTag::Unconstrained => 0,
            ModelTag::Constrained => 1,
            ModelTag::RelaxedC => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => ModelTag::Unconstrained,
            1 => ModelTag::Constrained,
            2 => ModelTag::RelaxedC,
            _ => return Err(Error::Malformed(format!("unknown model tag {code}"))),
        })
    }
}

impl std::str::FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unconstrained" => Ok(ModelTag::Unconstrained),
            "constrained" => Ok(ModelTag::Constrained),
            "relaxed_c" | "relaxed-c" | "c" => Ok(ModelTag::RelaxedC),
            _ => Err(invalid(format!("unknown model {s:?}"))),
        }
    }
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelTag::Unconstrained => "unconstrained",
            ModelTag::Constrained => "constrained",
            ModelTag::RelaxedC => "relaxed_c",
        })
    }
}

mod rhs_bits {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        bits.iter().map(|&b| b as u8).collect::<Vec<u8>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(serde::de::Error::custom(format!("rhs bit must be 0 or 1, got {b}"))),
            })
            .collect()
    }
}

/// A system `Ax = b` over GF(2) with `k` variables per equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    /// Variable indices of each equation; sorted, and strictly increasing
    /// unless the model is the relaxed chip model.
    pub rows: Vec<Vec<usize>>,
    #[serde(with = "rhs_bits")]
    pub rhs: Vec<bool>,
    pub model_tag: ModelTag,
    #[serde(default)]
    pub seed: Option<Seed>,
}

impl Instance {
    /// Builds an instance and checks every structural invariant of its model.
    pub fn new(k: usize, n: usize, rows: Vec<Vec<usize>>, rhs: Vec<bool>, model_tag: ModelTag) -> Result<Self> {
        let inst = Self {
            k,
            n,
            m: rows.len(),
            rows,
            rhs,
            model_tag,
            seed: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: self.rows.len(),
            });
        }
        if self.rhs.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: self.rhs.len(),
            });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.k {
                return Err(Error::Malformed(format!("row {i} has {} entries, expected k={}", row.len(), self.k)));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= self.n) {
                return Err(Error::Malformed(format!("row {i} uses variable {v} >= n={}", self.n)));
            }
            let strict = self.model_tag != ModelTag::RelaxedC;
            let sorted = row.windows(2).all(|w| if strict { w[0] < w[1] } else { w[0] <= w[1] });
            if !sorted {
                return Err(Error::Malformed(format!("row {i} is not sorted with distinct entries")));
            }
        }
        if self.model_tag == ModelTag::Constrained {
            if let Some(v) = self.degrees().iter().position(|&d| d < 2) {
                return Err(Error::Malformed(format!("constrained instance has variable {v} of degree < 2")));
            }
        }
        Ok(())
    }

    /// Number of rows containing each variable, counting multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for row in &self.rows {
            for &v in row {
                deg[v] += 1;
            }
        }
        deg
    }

    /// The coefficient matrix; repeated indices in a row cancel mod 2.
    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_sparse_rows(&self.rows, self.n).expect("validated instance")
    }

    /// Whether `x` satisfies every equation.
    pub fn is_satisfied_by(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .zip(&self.rhs)
            .all(|(row, &b)| row.iter().fold(false, |acc, &v| acc ^ x[v]) == b))
    }

    /// SHA-256 of the binary encoding, framed like a git blob.
    pub fn content_hash(&self) -> String {
        let bytes = encode_binary(self);
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
        hasher.update(&bytes);
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Writes JSON, or the binary format when the path ends in `.xsat`.
    pub fn save(&self, path: &Path) -> Result<()> {
        if is_binary_path(path) {
            std::fs::write(path, encode_binary(self))?;
        } else {
            std::fs::write(path, self.to_json()?)?;
        }
        Ok(())
    }

    /// Reads either format, detected from the leading magic bytes.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            decode_binary(&bytes)
        } else {
            let text = String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
            Self::from_json(&text)
        }
    }
}

fn is_binary_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "xsat")
}
