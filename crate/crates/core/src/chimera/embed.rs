//! Clique minor embedding on Chimera.
//!
//! Logical qubit `(g, k)` of a `size × size` block gets an L-shaped chain:
//! vertical qubits `k` of column `g` from row 0 down to the diagonal cell
//! `(g, g)`, then horizontal qubits `k` of row `g` from the diagonal to the
//! right edge. Any two chains cross in cell `(min g, max g)`, which gives
//! `K_{4·size}`. One extra logical qubit comes from splitting chain `(0, 3)`
//! into its vertical and horizontal halves: the vertical half is extended
//! down column 0 and every row-`g` horizontal arm is extended left to column
//! 0 so that they meet it. That reaches `K_{4m+1}` on an `m × m` grid, i.e.
//! 65 logical qubits on 16 × 16. Chains are then trimmed of qubits no
//! contact or connection depends on.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::graph::{ChimeraCoord, HardwareGraph, SHORE};

/// Chain of physical qubits for each logical qubit, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn new(mut chains: Vec<Vec<usize>>) -> Result<Self> {
        for c in &mut chains {
            c.sort_unstable();
        }
        let e = Self { chains };
        e.check_disjoint()?;
        Ok(e)
    }

    /// Each logical qubit on its own physical qubit.
    pub fn singletons(qubits: &[usize]) -> Result<Self> {
        Self::new(qubits.iter().map(|&q| vec![q]).collect())
    }

    pub fn n_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn chain(&self, i: usize) -> &[usize] {
        &self.chains[i]
    }

    pub fn total_qubits(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn max_chain_len(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut owner = HashMap::new();
        for (i, c) in self.chains.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::EmbeddingMismatch(format!("chain {i} is empty")));
            }
            for &q in c {
                if let Some(j) = owner.insert(q, i) {
                    if j != i {
                        return Err(Error::EmbeddingMismatch(format!(
                            "qubit {q} is shared by chains {j} and {i}"
                        )));
                    }
                    return Err(Error::EmbeddingMismatch(format!("qubit {q} repeated in chain {i}")));
                }
            }
        }
        Ok(())
    }

    /// Verifies that chains are disjoint, operable, connected, and that every
    /// listed logical pair is joined by at least one physical coupler.
    pub fn validate(
        &self,
        graph: &HardwareGraph,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<()> {
        self.check_disjoint()?;
        for (i, c) in self.chains.iter().enumerate() {
            if let Some(&q) = c.iter().find(|&&q| !graph.is_active(q)) {
                return Err(Error::EmbeddingMismatch(format!("chain {i} uses inoperable qubit {q}")));
            }
            if !connected(c, graph, None) {
                return Err(Error::EmbeddingMismatch(format!("chain {i} is not connected")));
            }
        }
        for (i, j) in pairs {
            if i >= self.n_logical() || j >= self.n_logical() {
                return Err(Error::EmbeddingMismatch(format!("pair ({i}, {j}) has no chain")));
            }
            if self.coupler_between(i, j, graph).is_none() {
                return Err(Error::EmbeddingMismatch(format!("no coupler joins chains {i} and {j}")));
            }
        }
        Ok(())
    }

    /// Lowest-index physical coupler `(a, b)`, `a < b`, joining chains `i`
    /// and `j`.
    pub fn coupler_between(&self, i: usize, j: usize, graph: &HardwareGraph) -> Option<(usize, usize)> {
        let mut best = None;
        for &p in &self.chains[i] {
            for q in graph.neighbors(p) {
                if self.chains[j].binary_search(&q).is_ok() {
                    let pair = (p.min(q), p.max(q));
                    if best.is_none_or(|b| pair < b) {
                        best = Some(pair);
                    }
                }
            }
        }
        best
    }
}

/// Whether `chain` (minus `skip`) induces a connected subgraph.
fn connected(chain: &[usize], graph: &HardwareGraph, skip: Option<usize>) -> bool {
    let members: Vec<usize> = chain.iter().copied().filter(|&q| Some(q) != skip).collect();
    let Some(&start) = members.first() else {
        return false;
    };
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for p in graph.neighbors(q) {
            if members.contains(&p) && !seen.contains(&p) {
                seen.push(p);
                queue.push_back(p);
            }
        }
    }
    seen.len() == members.len()
}

/// Largest complete graph the construction places on `graph`.
pub fn clique_capacity(graph: &HardwareGraph) -> usize {
    SHORE * graph.rows().min(graph.cols()) + 1
}

fn clique_chains(n: usize, size: usize, row0: usize, col0: usize, graph: &HardwareGraph) -> Vec<Vec<usize>> {
    let split = n == SHORE * size + 1;
    let at = |row: usize, col: usize, shore: usize, k: usize| {
        graph.linear(ChimeraCoord {
            row: row0 + row,
            col: col0 + col,
            shore,
            k,
        })
    };
    let mut chains = Vec::with_capacity(n);
    for g in 0..size {
        for k in 0..SHORE {
            if split && g == 0 && k == SHORE - 1 {
                chains.push((0..size).map(|r| at(r, 0, 0, k)).collect());
                chains.push((0..size).map(|c| at(0, c, 1, k)).collect());
                continue;
            }
            let left = if split { 0 } else { g };
            let mut chain: Vec<usize> = (0..=g).map(|r| at(r, g, 0, k)).collect();
            chain.extend((left..size).map(|c| at(g, c, 1, k)));
            chains.push(chain);
        }
    }
    chains.truncate(n);
    for c in chains.iter_mut() {
        c.sort_unstable();
    }
    chains
}

/// Drops qubits whose removal keeps every chain connected and every pair
/// of chains in contact. Deterministic: chains in order, each from its
/// highest index down, repeated until nothing changes.
fn prune(chains: &mut [Vec<usize>], graph: &HardwareGraph) {
    let n = chains.len();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, c) in chains.iter().enumerate() {
        for &q in c {
            owner.insert(q, i);
        }
    }
    let mut contacts = vec![0u32; n * n];
    for (i, c) in chains.iter().enumerate() {
        for &q in c {
            for p in graph.neighbors(q) {
                if let Some(&j) = owner.get(&p) {
                    if j != i {
                        contacts[i * n + j] += 1;
                    }
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            let mut idx = chains[i].len();
            while idx > 0 && chains[i].len() > 1 {
                idx -= 1;
                let q = chains[i][idx];
                let mut lost: Vec<usize> = graph
                    .neighbors(q)
                    .into_iter()
                    .filter_map(|p| owner.get(&p).copied())
                    .filter(|&j| j != i)
                    .collect();
                lost.sort_unstable();
                let keeps_contacts = lost
                    .chunk_by(|a, b| a == b)
                    .all(|run| contacts[i * n + run[0]] as usize > run.len());
                if !keeps_contacts || !connected(&chains[i], graph, Some(q)) {
                    continue;
                }
                chains[i].remove(idx);
                owner.remove(&q);
                for j in lost {
                    contacts[i * n + j] -= 1;
                    contacts[j * n + i] -= 1;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for c in chains.iter_mut() {
        c.sort_unstable();
    }
}

/// Embeds the complete graph `K_n`. Uses the smallest square block that
/// fits, at the first grid offset (row-major) where every chain qubit and
/// coupler the construction needs is operable.
pub fn embed_complete(n: usize, graph: &HardwareGraph) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot embed K_0".into()));
    }
    let capacity = clique_capacity(graph);
    if n > capacity {
        return Err(Error::TooManyLogicalQubits { n, capacity });
    }
    let size = n.saturating_sub(1).div_ceil(SHORE).max(1);
    let all_pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    for row0 in 0..=graph.rows() - size {
        for col0 in 0..=graph.cols() - size {
            let mut chains = clique_chains(n, size, row0, col0, graph);
            let candidate = Embedding { chains: chains.clone() };
            if candidate.validate(graph, all_pairs()).is_err() {
                continue;
            }
            prune(&mut chains, graph);
            return Ok(Embedding { chains });
        }
    }
    Err(Error::UnsupportedMask(format!(
        "no {size}x{size} block supports K_{n} under the current mask"
    )))
}
