//! Single-spin-flip Metropolis simulated annealing.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::error::{Error, Result};
use crate::qubo::{IsingProblem, QuboProblem, SolveResult};
use crate::seed;

/// Geometric inverse-temperature ramp from `beta_initial` to `beta_final`
/// over `sweeps` full passes; `reads` independent restarts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub reads: usize,
    pub seed: u64,
}

impl AnnealSchedule {
    pub fn new(sweeps: usize, beta_initial: f64, beta_final: f64, reads: usize, seed: u64) -> Result<Self> {
        let s = Self {
            sweeps,
            beta_initial,
            beta_final,
            reads,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return Err(Error::InvalidArgument("sweeps and reads must be >= 1".into()));
        }
        if !(self.beta_initial > 0.0 && self.beta_initial <= self.beta_final && self.beta_final.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < beta_initial <= beta_final, got {} and {}",
                self.beta_initial, self.beta_final
            )));
        }
        Ok(())
    }

    /// Picks the temperature range from the problem's energy scale: at the
    /// start the costliest single flip is accepted half the time, at the end
    /// the cheapest nonzero flip is accepted 1% of the time.
    pub fn auto(ising: &IsingProblem, sweeps: usize, reads: usize, seed: u64) -> Result<Self> {
        let (lo, hi) = auto_beta_range(ising);
        Self::new(sweeps, lo, hi, reads, seed)
    }

    pub fn beta_at(&self, sweep: usize) -> f64 {
        if self.sweeps <= 1 {
            return self.beta_final;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_initial * (self.beta_final / self.beta_initial).powf(t)
    }
}

pub fn auto_beta_range(ising: &IsingProblem) -> (f64, f64) {
    let n = ising.n();
    let mut reach = ising.h().iter().map(|h| h.abs()).collect::<Vec<_>>();
    let mut smallest = f64::INFINITY;
    for &h in ising.h() {
        if h != 0.0 {
            smallest = smallest.min(h.abs());
        }
    }
    for c in ising.couplings() {
        let a = c.value.abs();
        reach[c.i] += a;
        reach[c.j] += a;
        if a != 0.0 {
            smallest = smallest.min(a);
        }
    }
    let max_delta = 2.0 * reach.into_iter().fold(0.0, f64::max);
    if n == 0 || max_delta == 0.0 {
        return (1.0, 1.0);
    }
    let min_delta = 2.0 * smallest;
    let hot = 2f64.ln() / max_delta;
    let cold = (100f64.ln() / min_delta).max(hot);
    (hot, cold)
}

/// Compressed neighbour lists.
struct Csr {
    start: Vec<usize>,
    index: Vec<usize>,
    weight: Vec<f64>,
}

impl Csr {
    fn new(adj: Vec<Vec<(usize, f64)>>) -> Self {
        let mut start = vec![0];
        let (mut index, mut weight) = (Vec::new(), Vec::new());
        for row in adj {
            for (j, w) in row {
                index.push(j);
                weight.push(w);
            }
            start.push(index.len());
        }
        Self { start, index, weight }
    }

    fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.start[i]..self.start[i + 1];
        (&self.index[r.clone()], &self.weight[r])
    }
}

/// Uphill moves with `β·Δ` above this are rejected without drawing: their
/// acceptance probability is below the resolution of a uniform `f64`.
const MAX_EXPONENT: f64 = 40.0;

fn anneal_one(adj: &Csr, h: &[f64], schedule: &AnnealSchedule, stream: u64) -> Vec<i8> {
    let n = h.len();
    let mut rng = seed::substream(schedule.seed, stream);
    let mut spins: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let mut field: Vec<f64> = (0..n)
        .map(|i| {
            let (idx, w) = adj.row(i);
            h[i] + idx.iter().zip(w).map(|(&j, w)| w * spins[j]).sum::<f64>()
        })
        .collect();
    for sweep in 0..schedule.sweeps {
        let beta = schedule.beta_at(sweep);
        for i in 0..n {
            let delta = -2.0 * spins[i] * field[i];
            let accept = delta <= 0.0 || {
                let x = beta * delta;
                x < MAX_EXPONENT && rng.random::<f64>() < (-x).exp()
            };
            if accept {
                spins[i] = -spins[i];
                let twice = 2.0 * spins[i];
                let (idx, w) = adj.row(i);
                for (&j, w) in idx.iter().zip(w) {
                    field[j] += twice * w;
                }
            }
        }
    }
    spins.into_iter().map(|s| s as i8).collect()
}

/// Runs `schedule.reads` anneals; read `r` draws from substream
/// `first_stream + r` of `schedule.seed`. Reads run in parallel, and the
/// output is identical to a sequential run.
pub fn anneal_ising(ising: &IsingProblem, schedule: &AnnealSchedule, first_stream: u64) -> Vec<Vec<i8>> {
    let adj = Csr::new(ising.adjacency());
    (0..schedule.reads as u64)
        .into_par_iter()
        .map(|r| anneal_one(&adj, ising.h(), schedule, first_stream + r))
        .collect()
}

pub fn solve_sa(qubo: &QuboProblem, schedule: &AnnealSchedule) -> Result<SolveResult> {
    schedule.validate()?;
    let ising = qubo.to_ising();
    let candidates = anneal_ising(&ising, schedule, 0)
        .into_iter()
        .map(|s| {
            let code = SparseCode::from_spins(&s);
            let e = qubo.energy(&code)?;
            Ok((code, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveResult::from_candidates(candidates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Coupling;

    #[test]
    fn schedule_validation() {
        assert!(AnnealSchedule::new(0, 0.1, 1.0, 1, 0).is_err());
        assert!(AnnealSchedule::new(10, 0.1, 1.0, 0, 0).is_err());
        assert!(AnnealSchedule::new(10, 2.0, 1.0, 1, 0).is_err());
        assert!(AnnealSchedule::new(10, 0.0, 1.0, 1, 0).is_err());
        let s = AnnealSchedule::new(3, 0.1, 10.0, 1, 0).unwrap();
        assert!((s.beta_at(0) - 0.1).abs() < 1e-15);
        assert!((s.beta_at(1) - 1.0).abs() < 1e-12);
        assert!((s.beta_at(2) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_problem_has_zero_energy() {
        let s = AnnealSchedule::new(10, 0.1, 1.0, 3, 9).unwrap();
        let r = solve_sa(&QuboProblem::zero(5), &s).unwrap();
        assert_eq!(r.best_energy, 0.0);
        assert_eq!(r.reads_taken, 3);
        assert_eq!(r.all_energies.len(), 3);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let lin = vec![0.3, -0.2, 0.1, -0.4, 0.2, 0.05];
        let quad = (0..6).flat_map(|i| (i + 1..6).map(move |j| Coupling::new(i, j, ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4)));
        let p = QuboProblem::new(lin, quad, 0.0).unwrap();
        let s = AnnealSchedule::auto(&p.to_ising(), 5, 8, 1234).unwrap();
        assert_eq!(solve_sa(&p, &s).unwrap(), solve_sa(&p, &s).unwrap());
        let hot = AnnealSchedule::new(2, 1e-3, 1e-3, 8, 0).unwrap();
        let raw = |seed| anneal_ising(&p.to_ising(), &AnnealSchedule { seed, ..hot }, 0);
        assert_ne!(raw(1), raw(2));
    }

    #[test]
    fn auto_range_orders_hot_before_cold() {
        let p = IsingProblem::new(vec![1.0, -0.01], [Coupling::new(0, 1, 0.5)], 0.0).unwrap();
        let (hot, cold) = auto_beta_range(&p);
        assert!(hot < cold);
        assert!((hot - 2f64.ln() / 3.0).abs() < 1e-12);
        assert!((cold - 100f64.ln() / 0.02).abs() < 1e-9);
    }
}
