//! QUBO and Ising forms of the sparse-code inference problem, and the
//! classical ground-state solvers.

mod anneal;
mod exhaustive;
mod problem;

pub use anneal::{anneal_ising, auto_beta_range, solve_sa, AnnealSchedule};
pub use exhaustive::{solve_exhaustive, EXHAUSTIVE_MAX_VARS};
pub use problem::{
    build_qubo, ising_energy, qubo_energy, qubo_to_ising, Coupling, IsingProblem, QuboBuilder,
    QuboProblem,
};

use serde::{Deserialize, Serialize};

use crate::code::{tie_key, SparseCode};

/// Best code found by a solver, plus the energy of every read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_code: SparseCode,
    /// QUBO energy of `best_code`, offset included.
    pub best_energy: f64,
    pub reads_taken: usize,
    pub all_energies: Vec<f64>,
}

impl SolveResult {
    /// Lowest energy wins; equal energies go to the sparser code, then the
    /// lexicographically smaller one.
    pub(crate) fn from_candidates(candidates: Vec<(SparseCode, f64)>) -> Self {
        let all_energies: Vec<f64> = candidates.iter().map(|(_, e)| *e).collect();
        let reads_taken = candidates.len();
        let (best_code, best_energy) = candidates
            .into_iter()
            .reduce(|best, cand| {
                let better = cand.1 < best.1 || (cand.1 == best.1 && tie_key(&cand.0) < tie_key(&best.0));
                if better {
                    cand
                } else {
                    best
                }
            })
            .expect("at least one read");
        Self {
            best_code,
            best_energy,
            reads_taken,
            all_energies,
        }
    }
}
