//! Fully resolved commands. A job carries every option it needs, so the
//! manifest written after a run is enough to repeat it.

use std::fs;
use std::path::{Path, PathBuf};

use binsc_core::data::{csv_bytes, gen_synthetic, load_csv, split, SyntheticConfig};
use binsc_core::regress::{
    fit, fit_scaling, histogram, load_model, save_model, sweep_nq, FitConfig, PredictionReport, ScalingFit,
};
use binsc_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::table::{read_column, read_table, write_table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: binsc_core::data::DEFAULT_TRAIN_FRACTION,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub bins: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { bins: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingConfig {
    pub column: String,
    pub exclude_nq: Vec<usize>,
    pub curve_points: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            column: "q".into(),
            exclude_nq: Vec::new(),
            curve_points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub nq: Vec<usize>,
    pub fit: FitConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nq: vec![20, 29, 38, 47, 55, 64],
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    GenData {
        out: PathBuf,
        config: SyntheticConfig,
    },
    Split {
        input: PathBuf,
        train_out: PathBuf,
        test_out: PathBuf,
        config: SplitConfig,
    },
    Fit {
        train: PathBuf,
        test: PathBuf,
        out: PathBuf,
        config: FitConfig,
    },
    Predict {
        model: PathBuf,
        input: PathBuf,
        out: PathBuf,
    },
    Eval {
        predictions: PathBuf,
        truth: PathBuf,
        out: PathBuf,
        histogram: Option<PathBuf>,
        config: EvalConfig,
    },
    Sweep {
        train: PathBuf,
        test: PathBuf,
        out: PathBuf,
        config: SweepConfig,
    },
    FitScaling {
        input: PathBuf,
        out: PathBuf,
        curve: Option<PathBuf>,
        config: ScalingConfig,
    },
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn xs(path: &Path) -> Result<Vec<Vec<f64>>> {
    Ok(load_csv(path)?.into_iter().map(|s| s.x).collect())
}

#[derive(Serialize)]
struct EvalSummary {
    n: usize,
    q_value: f64,
    error_stddev: f64,
    target_stddev: f64,
    mean_error: f64,
}

#[derive(Serialize)]
struct ScalingSummary {
    column: String,
    points: usize,
    #[serde(flatten)]
    fit: ScalingFit,
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::GenData { .. } => "gen-data",
            Job::Split { .. } => "split",
            Job::Fit { .. } => "fit",
            Job::Predict { .. } => "predict",
            Job::Eval { .. } => "eval",
            Job::Sweep { .. } => "sweep",
            Job::FitScaling { .. } => "fit-scaling",
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        match self {
            Job::GenData { config, .. } => vec![config.seed],
            Job::Split { config, .. } => vec![config.seed],
            Job::Fit { config, .. } => vec![config.learn.seed],
            Job::Sweep { config, .. } => vec![config.fit.learn.seed],
            Job::Predict { .. } | Job::Eval { .. } | Job::FitScaling { .. } => Vec::new(),
        }
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Job::GenData { .. } => Vec::new(),
            Job::Split { input, .. } | Job::FitScaling { input, .. } => vec![input.clone()],
            Job::Fit { train, test, .. } | Job::Sweep { train, test, .. } => vec![train.clone(), test.clone()],
            Job::Predict { model, input, .. } => vec![model.clone(), input.clone()],
            Job::Eval { predictions, truth, .. } => vec![predictions.clone(), truth.clone()],
        }
    }

    pub fn outputs(&self) -> Vec<PathBuf> {
        match self {
            Job::GenData { out, .. } | Job::Fit { out, .. } | Job::Predict { out, .. } | Job::Sweep { out, .. } => {
                vec![out.clone()]
            }
            Job::Split { train_out, test_out, .. } => vec![train_out.clone(), test_out.clone()],
            Job::Eval { out, histogram, .. } => std::iter::once(out.clone()).chain(histogram.clone()).collect(),
            Job::FitScaling { out, curve, .. } => std::iter::once(out.clone()).chain(curve.clone()).collect(),
        }
    }

    /// Where the manifest goes: inside a model directory, else next to the
    /// first output.
    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Job::Fit { out, .. } => out.join("manifest.json"),
            _ => {
                let first = &self.outputs()[0];
                let mut name = first.file_name().unwrap_or_default().to_os_string();
                name.push(".manifest.json");
                first.with_file_name(name)
            }
        }
    }

    pub fn execute(&self) -> Result<()> {
        match self {
            Job::GenData { out, config } => write(out, csv_bytes(&gen_synthetic(config)?)?),
            Job::Split {
                input,
                train_out,
                test_out,
                config,
            } => {
                let (train, test) = split(&load_csv(input)?, config.train_fraction, config.seed)?;
                write(train_out, csv_bytes(&train)?)?;
                write(test_out, csv_bytes(&test)?)
            }
            Job::Fit {
                train,
                test,
                out,
                config,
            } => {
                let model = fit(&load_csv(train)?, &xs(test)?, config)?;
                save_model(out, &model)
            }
            Job::Predict { model, input, out } => {
                let model = load_model(model)?;
                let predictions = model.predictor()?.infer_batch(&xs(input)?)?;
                let rows: Vec<Vec<f64>> = predictions.into_iter().map(|(y, _)| vec![y]).collect();
                write(out, write_table(&["y_hat"], &rows))
            }
            Job::Eval {
                predictions,
                truth,
                out,
                histogram: hist_path,
                config,
            } => {
                let predicted = read_column(&read_table(predictions)?, "y_hat", predictions)?;
                let truth_values = load_csv(truth)?
                    .into_iter()
                    .map(|s| {
                        s.y.ok_or_else(|| Error::InvalidArgument(format!("{} has rows without y", truth.display())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let report = PredictionReport::from_predictions(predicted, &truth_values)?;
                let summary = EvalSummary {
                    n: truth_values.len(),
                    q_value: report.q_value,
                    error_stddev: report.error_stddev,
                    target_stddev: report.target_stddev,
                    mean_error: report.errors.iter().sum::<f64>() / report.errors.len() as f64,
                };
                write(out, json(&summary)?)?;
                if let Some(path) = hist_path {
                    let rows: Vec<Vec<f64>> = histogram(&report.errors, config.bins)
                        .into_iter()
                        .map(|(lo, hi, c)| vec![lo, hi, c as f64])
                        .collect();
                    write(path, write_table(&["left", "right", "count"], &rows))?;
                }
                Ok(())
            }
            Job::Sweep {
                train,
                test,
                out,
                config,
            } => {
                let rows = sweep_nq(&load_csv(train)?, &load_csv(test)?, &config.nq, &config.fit)?;
                let table: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n_q as f64,
                            r.q,
                            r.error_stddev,
                            r.sparsity,
                            r.lambda,
                            r.gamma,
                            r.train_iterations as f64,
                        ]
                    })
                    .collect();
                write(
                    out,
                    write_table(
                        &["n_q", "q", "error_stddev", "sparsity", "lambda", "gamma", "train_iterations"],
                        &table,
                    ),
                )
            }
            Job::FitScaling {
                input,
                out,
                curve,
                config,
            } => {
                let table = read_table(input)?;
                let ns = read_column(&table, "n_q", input)?;
                let values = read_column(&table, &config.column, input)?;
                let points: Vec<(f64, f64)> = ns
                    .into_iter()
                    .zip(values)
                    .filter(|(n, _)| !config.exclude_nq.iter().any(|&e| e as f64 == *n))
                    .collect();
                let result = fit_scaling(&points)?;
                let summary = ScalingSummary {
                    column: config.column.clone(),
                    points: points.len(),
                    fit: result,
                };
                write(out, json(&summary)?)?;
                if let Some(path) = curve {
                    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
                    let k = config.curve_points.max(2);
                    let rows: Vec<Vec<f64>> = (0..k)
                        .map(|i| {
                            let n = lo + (hi - lo) * i as f64 / (k - 1) as f64;
                            vec![n, result.eval(n)]
                        })
                        .collect();
                    write(path, write_table(&["n_q", "fitted"], &rows))?;
                }
                Ok(())
            }
        }
    }
}
