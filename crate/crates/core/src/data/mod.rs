//! Synthetic correlated datasets, CSV files and train/test splitting.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::seed;

/// Reproduces a 6976 / 8640 split of 15616 samples.
pub const DEFAULT_TRAIN_FRACTION: f64 = 6976.0 / 15616.0;

/// Low-rank model `x = A z + ε`, `y = b·z + ε_y` with `z` standard normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_samples: usize,
    pub d: usize,
    pub latent_dim: usize,
    pub noise_sigma: f64,
    pub target_noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            d: 20,
            latent_dim: 4,
            noise_sigma: 0.1,
            target_noise_sigma: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.latent_dim == 0 || self.latent_dim > self.d {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= latent_dim ({}) <= d ({})",
                self.latent_dim, self.d
            )));
        }
        for (name, s) in [("noise_sigma", self.noise_sigma), ("target_noise_sigma", self.target_noise_sigma)] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

pub fn gen_synthetic(config: &SyntheticConfig) -> Result<Vec<Sample>> {
    config.validate()?;
    let mut rng = seed::rng(config.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mixing = DMatrix::from_fn(config.d, config.latent_dim, |_, _| normal());
    let weights = DVector::from_fn(config.latent_dim, |_, _| normal());
    (0..config.n_samples)
        .map(|_| {
            let z = DVector::from_fn(config.latent_dim, |_, _| normal());
            let mut x = &mixing * &z;
            x.iter_mut().for_each(|v| *v += config.noise_sigma * normal());
            let y = weights.dot(&z) + config.target_noise_sigma * normal();
            Sample::labeled(x.as_slice().to_vec(), y)
        })
        .collect()
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => parse_err(path, line, format!("{other:?}")),
    }
}

/// Reads `x1,…,xD[,y]`. When the header has a `y` column, rows may leave it
/// empty or omit it.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut records = reader.records();
    let Some(header) = records.next() else {
        return Ok(Vec::new());
    };
    let header = header.map_err(|e| csv_err(path, e))?;
    let has_y = header.iter().last() == Some("y");
    let d = header.len() - usize::from(has_y);
    for (i, name) in header.iter().take(d).enumerate() {
        if name != format!("x{}", i + 1) {
            return Err(parse_err(path, 1, format!("expected column x{}, found {name:?}", i + 1)));
        }
    }
    let mut samples = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d && !(has_y && record.len() == d + 1) {
            return Err(Error::DimensionMismatch {
                expected: d + usize::from(has_y),
                found: record.len(),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| parse_err(path, line, format!("{s:?}: {e}")))
        };
        let x = record.iter().take(d).map(parse).collect::<Result<Vec<_>>>()?;
        let y = match record.get(d) {
            Some(s) if !s.is_empty() => Some(parse(s)?),
            _ => None,
        };
        samples.push(Sample::new(x, y).map_err(|_| parse_err(path, line, "non-finite value"))?);
    }
    Ok(samples)
}

/// Writes shortest round-trip decimal representations, so loading gives the
/// same bits back. The `y` column appears when any sample has a target.
pub fn save_csv(path: impl AsRef<Path>, samples: &[Sample]) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&csv_bytes(samples)?).map_err(|e| Error::io(path, e))
}

pub fn csv_bytes(samples: &[Sample]) -> Result<Vec<u8>> {
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    let has_y = samples.iter().any(|s| s.y.is_some());
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    if has_y {
        header.push("y".into());
    }
    let to_io = |e: csv::Error| Error::InvalidArgument(format!("csv encoding failed: {e}"));
    writer.write_record(&header).map_err(to_io)?;
    for s in samples {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        let mut row: Vec<String> = s.x.iter().map(|v| format!("{v:?}")).collect();
        if has_y {
            row.push(s.y.map(|v| format!("{v:?}")).unwrap_or_default());
        }
        writer.write_record(&row).map_err(to_io)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv encoding failed: {e}")))
}

/// Seeded shuffle, then the first `floor(fraction · n)` samples train.
pub fn split(samples: &[Sample], train_fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Empty("samples to split"));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut seed::rng(seed));
    let n_train = (train_fraction * samples.len() as f64 + 1e-9).floor() as usize;
    let pick = |idx: &[usize]| idx.iter().map(|&i| samples[i].clone()).collect();
    Ok((pick(&order[..n_train]), pick(&order[n_train..])))
}
