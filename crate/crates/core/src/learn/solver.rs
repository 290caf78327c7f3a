use serde::{Deserialize, Serialize};

use crate::chimera::{
    default_chain_strengths, embed_complete, solve_embedded, ChainStrength, Embedding, HardwareGraph,
    HardwareMask,
};
use crate::error::{Error, Result};
use crate::qubo::{solve_exhaustive, solve_sa, AnnealSchedule, QuboProblem, SolveResult};

/// Which ground-state search backs sparse inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolverConfig {
    /// Enumerate all `2^N` codes.
    Exhaustive,
    /// Simulated annealing on the logical problem.
    Sa {
        sweeps: usize,
        reads: usize,
        /// Fixed `(beta_initial, beta_final)`; derived from each problem's
        /// coefficient scale when absent.
        #[serde(default)]
        beta_range: Option<(f64, f64)>,
    },
    /// Simulated annealing on a Chimera graph through a clique embedding,
    /// `reads` per chain strength.
    EmbeddedSa {
        sweeps: usize,
        reads: usize,
        #[serde(default)]
        beta_range: Option<(f64, f64)>,
        /// Ten values spread around the problem's coefficient scale when absent.
        #[serde(default)]
        chain_strengths: Option<Vec<f64>>,
        grid_rows: usize,
        grid_cols: usize,
        #[serde(default)]
        mask: HardwareMask,
    },
}

impl SolverConfig {
    pub fn sa() -> Self {
        SolverConfig::Sa {
            sweeps: 200,
            reads: 8,
            beta_range: None,
        }
    }

    /// Ten chain strengths, twenty reads each, on a perfect 16 × 16 Chimera.
    pub fn embedded_sa() -> Self {
        SolverConfig::EmbeddedSa {
            sweeps: 200,
            reads: 20,
            beta_range: None,
            chain_strengths: None,
            grid_rows: 16,
            grid_cols: 16,
            mask: HardwareMask::default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::Exhaustive => "exhaustive",
            SolverConfig::Sa { .. } => "sa",
            SolverConfig::EmbeddedSa { .. } => "embedded-sa",
        }
    }
}

fn schedule(
    ising: &crate::qubo::IsingProblem,
    sweeps: usize,
    reads: usize,
    beta_range: Option<(f64, f64)>,
    seed: u64,
) -> Result<AnnealSchedule> {
    match beta_range {
        Some((b0, b1)) => AnnealSchedule::new(sweeps, b0, b1, reads, seed),
        None => AnnealSchedule::auto(ising, sweeps, reads, seed),
    }
}

/// A solver bound to a fixed problem size (the embedding is computed once).
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    n: usize,
    hardware: Option<(HardwareGraph, Embedding, Option<Vec<ChainStrength>>)>,
}

impl Solver {
    pub fn new(config: &SolverConfig, n: usize) -> Result<Self> {
        let hardware = match config {
            SolverConfig::Exhaustive | SolverConfig::Sa { .. } => None,
            SolverConfig::EmbeddedSa {
                grid_rows,
                grid_cols,
                mask,
                chain_strengths,
                ..
            } => {
                let graph = mask.apply(*grid_rows, *grid_cols)?;
                let embedding = embed_complete(n, &graph)?;
                let strengths = chain_strengths
                    .as_ref()
                    .map(|v| v.iter().map(|&x| ChainStrength::new(x)).collect::<Result<Vec<_>>>())
                    .transpose()?;
                Some((graph, embedding, strengths))
            }
        };
        Ok(Self {
            config: config.clone(),
            n,
            hardware,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.hardware.as_ref().map(|(_, e, _)| e)
    }

    pub fn solve(&self, qubo: &QuboProblem, seed: u64) -> Result<SolveResult> {
        if qubo.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: qubo.n(),
            });
        }
        match (&self.config, &self.hardware) {
            (SolverConfig::Exhaustive, _) => solve_exhaustive(qubo),
            (
                SolverConfig::Sa {
                    sweeps,
                    reads,
                    beta_range,
                },
                _,
            ) => {
                let s = schedule(&qubo.to_ising(), *sweeps, *reads, *beta_range, seed)?;
                solve_sa(qubo, &s)
            }
            (
                SolverConfig::EmbeddedSa {
                    sweeps,
                    reads,
                    beta_range,
                    ..
                },
                Some((graph, embedding, strengths)),
            ) => {
                let ising = qubo.to_ising();
                let s = schedule(&ising, *sweeps, *reads, *beta_range, seed)?;
                let xi = match strengths {
                    Some(v) => v.clone(),
                    None => default_chain_strengths(&ising),
                };
                let mut r = solve_embedded(&ising, embedding, graph, &xi, &s)?.result;
                r.best_energy = qubo.energy(&r.best_code)?;
                Ok(r)
            }
            (SolverConfig::EmbeddedSa { .. }, None) => unreachable!("hardware built in Solver::new"),
        }
    }
}
