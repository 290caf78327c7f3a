//! Model directories: `stats.csv`, `dictionary.csv` and `config.json`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{matrix_rows, FitConfig, RegressionModel};
use crate::dictionary::Dictionary;
use crate::energy::SparsityPenalty;
use crate::error::{Error, Result};
use crate::learn::TrainTrace;
use crate::standardize::StandardizationStats;

pub const MODEL_STATS_FILE: &str = "stats.csv";
pub const MODEL_DICTIONARY_FILE: &str = "dictionary.csv";
pub const MODEL_CONFIG_FILE: &str = "config.json";

#[derive(Serialize, Deserialize)]
struct ModelConfig {
    fit: FitConfig,
    lambda: SparsityPenalty,
    pretrain_trace: TrainTrace,
    train_trace: TrainTrace,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_rows(path: &Path, text: &str, skip_header: bool) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .skip(usize::from(skip_header))
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        line: i as u64 + 1,
                        message: format!("{t:?}: {e}"),
                    })
                })
                .collect()
        })
        .collect()
}

pub fn save_model(dir: impl AsRef<Path>, model: &RegressionModel) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut stats = String::from("mean,stddev\n");
    for (m, s) in model.stats.means.iter().zip(&model.stats.stddevs) {
        stats += &format!("{},{}\n", fmt(*m), fmt(*s));
    }
    write(&dir.join(MODEL_STATS_FILE), stats)?;
    let mut dict = String::new();
    for row in matrix_rows(model.extended_dictionary.matrix()) {
        dict += &row.into_iter().map(fmt).collect::<Vec<_>>().join(",");
        dict.push('\n');
    }
    write(&dir.join(MODEL_DICTIONARY_FILE), dict)?;
    let config = ModelConfig {
        fit: model.config.clone(),
        lambda: model.lambda,
        pretrain_trace: model.pretrain_trace.clone(),
        train_trace: model.train_trace.clone(),
    };
    write(&dir.join(MODEL_CONFIG_FILE), serde_json::to_string_pretty(&config)? + "\n")
}

pub fn load_model(dir: impl AsRef<Path>) -> Result<RegressionModel> {
    let dir = dir.as_ref();
    let stats_path = dir.join(MODEL_STATS_FILE);
    let rows = parse_rows(&stats_path, &read(&stats_path)?, true)?;
    if let Some(bad) = rows.iter().position(|r| r.len() != 2) {
        return Err(Error::Parse {
            path: stats_path,
            line: bad as u64 + 2,
            message: "expected mean,stddev".into(),
        });
    }
    let stats = StandardizationStats::new(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| r[1]).collect())?;

    let dict_path = dir.join(MODEL_DICTIONARY_FILE);
    let rows = parse_rows(&dict_path, &read(&dict_path)?, false)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse {
            path: dict_path,
            line: 0,
            message: "ragged dictionary rows".into(),
        });
    }
    if rows.len() != stats.means.len() {
        return Err(Error::DimensionMismatch {
            expected: stats.means.len(),
            found: rows.len(),
        });
    }
    let matrix = DMatrix::from_row_iterator(rows.len(), cols, rows.into_iter().flatten());
    let extended_dictionary = Dictionary::new(matrix)?;

    let config_path = dir.join(MODEL_CONFIG_FILE);
    let config: ModelConfig = serde_json::from_str(&read(&config_path)?)?;
    if config.fit.n_q != cols {
        return Err(Error::DimensionMismatch {
            expected: config.fit.n_q,
            found: cols,
        });
    }
    Ok(RegressionModel {
        stats,
        extended_dictionary,
        config: config.fit,
        lambda: config.lambda,
        pretrain_trace: config.pretrain_trace,
        train_trace: config.train_trace,
    })
}
