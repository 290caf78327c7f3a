use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::dictionary::Dictionary;
use crate::error::{check_dim, Error, Result};

/// The sparsity penalty `λ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SparsityPenalty(f64);

impl SparsityPenalty {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sparsity penalty must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self(lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SparsityPenalty {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SparsityPenalty> for f64 {
    fn from(p: SparsityPenalty) -> f64 {
        p.0
    }
}

/// `½‖x − φa‖² + λ·|a|`.
pub fn sc_energy(
    dictionary: &Dictionary,
    x: &[f64],
    code: &SparseCode,
    lambda: SparsityPenalty,
) -> Result<f64> {
    check_dim(dictionary.dim(), x.len())?;
    let recon = dictionary.reconstruct(code)?;
    let sq: f64 = x.iter().zip(recon.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.5 * sq + lambda.value() * code.count_ones() as f64)
}
