use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::error::{Error, Result};
use crate::qubo::{anneal_ising, AnnealSchedule, Coupling, IsingProblem, SolveResult};

use super::embed::Embedding;
use super::graph::HardwareGraph;

/// Magnitude `ξ > 0` of the ferromagnetic coupling placed on every
/// intra-chain coupler.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ChainStrength(f64);

impl ChainStrength {
    pub fn new(xi: f64) -> Result<Self> {
        if xi.is_finite() && xi > 0.0 {
            Ok(Self(xi))
        } else {
            Err(Error::InvalidArgument(format!("chain strength must be > 0, got {xi}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ChainStrength {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ChainStrength> for f64 {
    fn from(x: ChainStrength) -> f64 {
        x.0
    }
}

/// Ten geometrically spaced strengths spanning `[0.5, 5] × max|coefficient|`.
pub fn default_chain_strengths(ising: &IsingProblem) -> Vec<ChainStrength> {
    let scale = match ising.max_abs_coefficient() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let (lo, hi) = (0.5 * scale, 5.0 * scale);
    (0..10)
        .map(|t| ChainStrength(lo * (hi / lo).powf(t as f64 / 9.0)))
        .collect()
}

/// Ising problem on the physical qubits used by an embedding. Variable `p`
/// of `problem` is physical qubit `qubits[p]`, which belongs to chain
/// `chain_of[p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedIsing {
    pub qubits: Vec<usize>,
    pub chain_of: Vec<usize>,
    pub problem: IsingProblem,
    pub intra_chain_couplers: usize,
}

/// Spreads each bias evenly over its chain, puts each logical coupling on
/// the lowest-index coupler between the two chains, and binds chains with
/// `−ξ` on every intra-chain coupler.
pub fn embed_ising(
    ising: &IsingProblem,
    embedding: &Embedding,
    xi: ChainStrength,
    graph: &HardwareGraph,
) -> Result<EmbeddedIsing> {
    if embedding.n_logical() != ising.n() {
        return Err(Error::EmbeddingMismatch(format!(
            "{} chains for {} logical variables",
            embedding.n_logical(),
            ising.n()
        )));
    }
    let required = ising.couplings().iter().filter(|c| c.value != 0.0).map(|c| (c.i, c.j));
    embedding.validate(graph, required)?;

    let mut located: Vec<(usize, usize)> = embedding
        .chains()
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&q| (q, i)))
        .collect();
    located.sort_unstable();
    let position: HashMap<usize, usize> = located.iter().enumerate().map(|(p, &(q, _))| (q, p)).collect();

    let mut h = vec![0.0; located.len()];
    for (i, chain) in embedding.chains().iter().enumerate() {
        let share = ising.h()[i] / chain.len() as f64;
        for q in chain {
            h[position[q]] += share;
        }
    }
    let mut couplings = Vec::new();
    for c in ising.couplings().iter().filter(|c| c.value != 0.0) {
        let (a, b) = embedding
            .coupler_between(c.i, c.j, graph)
            .expect("validated above");
        couplings.push(Coupling::new(position[&a], position[&b], c.value));
    }
    let mut intra = 0;
    for chain in embedding.chains() {
        for (x, &a) in chain.iter().enumerate() {
            for &b in &chain[x + 1..] {
                if graph.has_coupler(a, b) {
                    couplings.push(Coupling::new(position[&a], position[&b], -xi.value()));
                    intra += 1;
                }
            }
        }
    }
    Ok(EmbeddedIsing {
        qubits: located.iter().map(|&(q, _)| q).collect(),
        chain_of: located.iter().map(|&(_, i)| i).collect(),
        problem: IsingProblem::new(h, couplings, ising.offset())?,
        intra_chain_couplers: intra,
    })
}

fn majority(sum: i64) -> i8 {
    if sum > 0 {
        1
    } else {
        -1
    }
}

impl EmbeddedIsing {
    /// Majority vote per chain over a spin vector indexed like `problem`.
    /// Returns the logical spins and the number of broken chains.
    pub fn unembed(&self, spins: &[i8], n_logical: usize) -> (Vec<i8>, usize) {
        let mut sum = vec![0i64; n_logical];
        let mut ups = vec![false; n_logical];
        let mut downs = vec![false; n_logical];
        for (&s, &c) in spins.iter().zip(&self.chain_of) {
            sum[c] += s as i64;
            if s > 0 {
                ups[c] = true;
            } else {
                downs[c] = true;
            }
        }
        let broken = ups.iter().zip(&downs).filter(|(u, d)| **u && **d).count();
        (sum.into_iter().map(majority).collect(), broken)
    }
}

/// Majority vote over each chain of a hardware-wide spin assignment
/// (indexed by physical qubit). Exact ties resolve to `−1`.
pub fn unembed(physical_spins: &[i8], embedding: &Embedding) -> Vec<i8> {
    embedding
        .chains()
        .iter()
        .map(|c| majority(c.iter().map(|&q| physical_spins[q] as i64).sum()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBreakStats {
    pub xi: f64,
    pub reads: usize,
    pub broken_chains: usize,
    pub total_chains: usize,
}

impl ChainBreakStats {
    pub fn fraction(&self) -> f64 {
        if self.total_chains == 0 {
            0.0
        } else {
            self.broken_chains as f64 / self.total_chains as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSolve {
    pub result: SolveResult,
    pub chain_breaks: Vec<ChainBreakStats>,
}

/// For each `ξ`, anneals the physical problem for `schedule.reads` reads,
/// unembeds every read and scores it by its logical energy. Read `r` of the
/// `b`-th strength uses substream `b·reads + r`.
pub fn solve_embedded(
    ising: &IsingProblem,
    embedding: &Embedding,
    graph: &HardwareGraph,
    xi_list: &[ChainStrength],
    schedule: &AnnealSchedule,
) -> Result<EmbeddedSolve> {
    if xi_list.is_empty() {
        return Err(Error::InvalidArgument("no chain strengths given".into()));
    }
    schedule.validate()?;
    let n = ising.n();
    let per_xi = xi_list
        .par_iter()
        .enumerate()
        .map(|(b, &xi)| {
            let phys = embed_ising(ising, embedding, xi, graph)?;
            let reads = anneal_ising(&phys.problem, schedule, (b * schedule.reads) as u64);
            let mut broken = 0;
            let mut candidates = Vec::with_capacity(reads.len());
            for s in reads {
                let (logical, b) = phys.unembed(&s, n);
                broken += b;
                let e = ising.energy(&logical)?;
                candidates.push((SparseCode::from_spins(&logical), e));
            }
            let stats = ChainBreakStats {
                xi: xi.value(),
                reads: schedule.reads,
                broken_chains: broken,
                total_chains: schedule.reads * n,
            };
            Ok((candidates, stats))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut candidates = Vec::with_capacity(xi_list.len() * schedule.reads);
    let mut chain_breaks = Vec::with_capacity(xi_list.len());
    for (c, s) in per_xi {
        candidates.extend(c);
        chain_breaks.push(s);
    }
    Ok(EmbeddedSolve {
        result: SolveResult::from_candidates(candidates),
        chain_breaks,
    })
}
