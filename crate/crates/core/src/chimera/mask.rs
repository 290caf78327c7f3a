//! Plain-text hardware masks: `q <index>` marks an inoperable qubit,
//! `c <i> <j>` an inoperable coupler. Blank lines and `#` comments are
//! ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::graph::{build_chimera, HardwareGraph};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardwareMask {
    pub qubits: Vec<usize>,
    pub couplers: Vec<(usize, usize)>,
}

impl HardwareMask {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut mask = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: idx as u64 + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("bad index {s:?}: {e}")));
            match fields.as_slice() {
                ["q", i] => mask.qubits.push(num(i)?),
                ["c", i, j] => mask.couplers.push((num(i)?, num(j)?)),
                _ => return Err(err(format!("expected `q <i>` or `c <i> <j>`, got {line:?}"))),
            }
        }
        Ok(mask)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in &self.qubits {
            s.push_str(&format!("q {q}\n"));
        }
        for (a, b) in &self.couplers {
            s.push_str(&format!("c {a} {b}\n"));
        }
        s
    }

    pub fn apply(&self, rows: usize, cols: usize) -> Result<HardwareGraph> {
        build_chimera(rows, cols, self.qubits.iter().copied(), self.couplers.iter().copied())
    }
}

impl From<&HardwareGraph> for HardwareMask {
    fn from(g: &HardwareGraph) -> Self {
        Self {
            qubits: g.inoperable_qubits().iter().copied().collect(),
            couplers: g.inoperable_couplers().iter().copied().collect(),
        }
    }
}
