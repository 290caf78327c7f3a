//! Zero-mean / unit-variance scaling fitted on training data.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::sample::Sample;

/// Per-coordinate mean and sample standard deviation. The last entry holds
/// the statistics of `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

/// Sample mean and `n - 1` standard deviation of a slice.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

impl StandardizationStats {
    pub fn new(means: Vec<f64>, stddevs: Vec<f64>) -> Result<Self> {
        check_dim(means.len(), stddevs.len())?;
        if means.len() < 2 {
            return Err(Error::InvalidArgument(
                "statistics need at least one input coordinate and y".into(),
            ));
        }
        if means.iter().chain(&stddevs).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("standardization statistics"));
        }
        if let Some(c) = stddevs.iter().position(|&s| s <= 0.0) {
            return Err(Error::ZeroVariance { coordinate: c });
        }
        Ok(Self { means, stddevs })
    }

    /// Input dimension `D` (the statistics cover `D + 1` coordinates).
    pub fn input_dim(&self) -> usize {
        self.means.len() - 1
    }

    /// Index of the `y` coordinate.
    pub fn target_index(&self) -> usize {
        self.input_dim()
    }

    pub fn fit(train: &[Sample]) -> Result<Self> {
        standardize_fit(train)
    }

    pub fn apply(&self, sample: &Sample) -> Result<Sample> {
        standardize_apply(self, sample)
    }

    /// Standardizes the inputs only.
    pub fn apply_x(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.means[i]) / self.stddevs[i])
            .collect())
    }

    pub fn invert(&self, value: f64, coordinate: usize) -> Result<f64> {
        standardize_invert(self, value, coordinate)
    }
}

pub fn standardize_fit(train: &[Sample]) -> Result<StandardizationStats> {
    if train.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: train.len(),
        });
    }
    let dim = train[0].dim();
    let mut columns = vec![Vec::with_capacity(train.len()); dim + 1];
    for s in train {
        check_dim(dim, s.dim())?;
        let y = s
            .y
            .ok_or_else(|| Error::InvalidArgument("training sample without y".into()))?;
        for (col, &v) in columns.iter_mut().zip(&s.x) {
            col.push(v);
        }
        columns[dim].push(y);
    }
    let (means, stddevs): (Vec<f64>, Vec<f64>) = columns.iter().map(|c| mean_std(c)).unzip();
    StandardizationStats::new(means, stddevs)
}

/// `(v - mean) / stddev` on every coordinate present in the sample.
pub fn standardize_apply(stats: &StandardizationStats, sample: &Sample) -> Result<Sample> {
    let x = stats.apply_x(&sample.x)?;
    let t = stats.target_index();
    let y = sample.y.map(|y| (y - stats.means[t]) / stats.stddevs[t]);
    Ok(Sample { x, y })
}

/// `value * stddev + mean` for one coordinate.
pub fn standardize_invert(stats: &StandardizationStats, value: f64, coordinate: usize) -> Result<f64> {
    if coordinate >= stats.means.len() {
        return Err(Error::IndexOutOfRange {
            index: coordinate,
            limit: stats.means.len(),
        });
    }
    Ok(value * stats.stddevs[coordinate] + stats.means[coordinate])
}
