use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary activation vector `a ∈ {0,1}^N_q`.
/// Serialized as a string of `0`/`1` characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SparseCode(Vec<bool>);

impl TryFrom<String> for SparseCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SparseCode> for String {
    fn from(c: SparseCode) -> String {
        c.to_string()
    }
}

impl std::str::FromStr for SparseCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("code character {c:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl SparseCode {
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Accepts only 0 and 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidArgument(format!("code entry {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Bit `i` of `mask` becomes entry `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    /// `a_i = (s_i + 1) / 2`.
    pub fn from_spins(spins: &[i8]) -> Self {
        Self(spins.iter().map(|&s| s > 0).collect())
    }

    pub fn to_spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Number of ones; for binary codes this is both the L0 and L1 norm.
    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of the ones.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl std::fmt::Display for SparseCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Tie-break order between equal-energy codes: fewer ones first, then
/// lexicographically smallest bit sequence.
pub(crate) fn tie_key(code: &SparseCode) -> (usize, &[bool]) {
    (code.count_ones(), code.bits())
}
