use crate::error::{Error, Result};

/// One observation: inputs `x` and, for training data, the target `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Option<f64>,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Option<f64>) -> Result<Self> {
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample"));
        }
        Ok(Self { x, y })
    }

    pub fn labeled(x: Vec<f64>, y: f64) -> Result<Self> {
        Self::new(x, Some(y))
    }

    pub fn unlabeled(x: Vec<f64>) -> Result<Self> {
        Self::new(x, None)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `(x, y)`, the vector the extended dictionary reconstructs.
    pub fn concatenated(&self) -> Option<Vec<f64>> {
        self.y.map(|y| {
            let mut v = self.x.clone();
            v.push(y);
            v
        })
    }
}
