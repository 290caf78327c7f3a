//! Exact ground state by depth-first branch and bound.
//!
//! Variables are fixed one at a time, most attractive linear term first.
//! A subtree is skipped only when a lower bound on every code in it exceeds
//! the incumbent by more than the tie tolerance, so the result equals full
//! enumeration.

use crate::code::SparseCode;
use crate::error::{Error, Result};
use crate::qubo::{QuboProblem, SolveResult};

pub const EXHAUSTIVE_MAX_VARS: usize = 26;

struct Incumbent {
    n: usize,
    energy: f64,
    mask: u64,
}

impl Incumbent {
    fn tol(&self) -> f64 {
        1e-12 * (1.0 + self.energy.abs())
    }

    /// Fewer ones first, then lexicographically smallest `a_0 a_1 …`.
    fn tie_key(&self, mask: u64) -> (u32, u64) {
        let lex = if self.n == 0 { 0 } else { mask.reverse_bits() >> (64 - self.n) };
        (mask.count_ones(), lex)
    }

    #[inline]
    fn offer(&mut self, energy: f64, mask: u64) {
        if self.energy == f64::INFINITY {
            self.energy = energy;
            self.mask = mask;
            return;
        }
        if energy > self.energy + self.tol() {
            return;
        }
        if energy < self.energy - self.tol() || self.tie_key(mask) < self.tie_key(self.mask) {
            self.energy = energy;
            self.mask = mask;
        }
    }
}

struct Search<'a> {
    n: usize,
    /// Symmetric couplings, zero diagonal.
    w: &'a [f64],
    order: Vec<usize>,
    /// Per depth: local fields `g` then half the negative coupling mass
    /// `neg` towards still-free variables, `2n` values per level.
    scratch: Vec<f64>,
    best: Incumbent,
}

impl Search<'_> {
    /// `energy` is the cost of `mask` with every free variable at zero.
    fn visit(&mut self, depth: usize, mask: u64, energy: f64) {
        self.best.offer(energy, mask);
        let n = self.n;
        if depth == n {
            return;
        }
        let base = depth * 2 * n;
        // Any nonempty set S of free variables adds at least
        // Σ_{i∈S} (g_i + neg_i) to the energy.
        let mut negative = 0.0;
        let mut smallest = f64::INFINITY;
        for &i in &self.order[depth..] {
            let c = self.scratch[base + i] + self.scratch[base + n + i];
            if c < 0.0 {
                negative += c;
            }
            smallest = smallest.min(c);
        }
        let bound = energy + if negative < 0.0 { negative } else { smallest };
        if bound > self.best.energy + self.best.tol() {
            return;
        }
        let v = self.order[depth];
        let gv = self.scratch[base + v];
        let next = base + 2 * n;
        let (lower, upper) = self.scratch.split_at_mut(next);
        let (cur, child) = (&lower[base..], &mut upper[..2 * n]);
        for &j in &self.order[depth + 1..] {
            child[n + j] = cur[n + j] - 0.5 * self.w[j * n + v].min(0.0);
        }
        let include_first = gv < 0.0;
        for branch in [include_first, !include_first] {
            let (lower, upper) = self.scratch.split_at_mut(next);
            let (cur, child) = (&lower[base..], &mut upper[..2 * n]);
            for &j in &self.order[depth + 1..] {
                child[j] = if branch { cur[j] + self.w[j * n + v] } else { cur[j] };
            }
            if branch {
                self.visit(depth + 1, mask | 1 << v, energy + gv);
            } else {
                self.visit(depth + 1, mask, energy);
            }
        }
    }
}

pub fn solve_exhaustive(qubo: &QuboProblem) -> Result<SolveResult> {
    let n = qubo.n();
    if n > EXHAUSTIVE_MAX_VARS {
        return Err(Error::TooLarge {
            n,
            max: EXHAUSTIVE_MAX_VARS,
        });
    }
    let w = qubo.dense_symmetric();
    let q = qubo.linear();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| q[a].total_cmp(&q[b]).then(a.cmp(&b)));
    let mut scratch = vec![0.0; (n + 1) * 2 * n];
    for i in 0..n {
        scratch[i] = q[i];
        scratch[n + i] = 0.5 * (0..n).map(|j| w[i * n + j].min(0.0)).sum::<f64>();
    }
    let mut search = Search {
        n,
        w: &w,
        order,
        scratch,
        best: Incumbent {
            n,
            energy: f64::INFINITY,
            mask: 0,
        },
    };
    search.visit(0, 0, qubo.offset());

    let code = SparseCode::from_mask(search.best.mask, n);
    let energy = qubo.energy(&code)?;
    Ok(SolveResult {
        best_code: code,
        best_energy: energy,
        reads_taken: 1,
        all_energies: vec![energy],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Coupling;

    fn brute(qubo: &QuboProblem) -> (f64, SparseCode) {
        let n = qubo.n();
        let mut best: Option<(f64, SparseCode)> = None;
        for m in 0..1u64 << n {
            let c = SparseCode::from_mask(m, n);
            let e = qubo.energy(&c).unwrap();
            let better = match &best {
                None => true,
                Some((be, bc)) => {
                    e < be - 1e-12 || ((e - be).abs() <= 1e-12 && crate::code::tie_key(&c) < crate::code::tie_key(bc))
                }
            };
            if better {
                best = Some((e, c));
            }
        }
        best.unwrap()
    }

    fn random_qubo(n: usize, seed: u64) -> QuboProblem {
        use rand::Rng;
        let mut rng = crate::seed::rng(seed);
        let lin = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                quad.push(Coupling::new(i, j, rng.random_range(-1.0..1.0)));
            }
        }
        QuboProblem::new(lin, quad, rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn matches_naive_enumeration() {
        for n in [0, 1, 2, 5, 11, 12, 13, 15, 18] {
            for seed in 0..4 {
                let p = random_qubo(n, seed * 31 + n as u64);
                let r = solve_exhaustive(&p).unwrap();
                let (e, c) = brute(&p);
                assert_eq!(r.best_code, c, "n={n} seed={seed}");
                assert!((r.best_energy - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ties_prefer_sparser_then_lexicographic() {
        // every code with exactly one active variable costs -1; pairs cost +1
        let n = 4;
        let lin = vec![-1.0; n];
        let quad = (0..n).flat_map(|i| (i + 1..n).map(move |j| Coupling::new(i, j, 5.0)));
        let p = QuboProblem::new(lin, quad, 0.0).unwrap();
        assert_eq!(solve_exhaustive(&p).unwrap().best_code.to_string(), "0001");

        let zero = QuboProblem::zero(6);
        let r = solve_exhaustive(&zero).unwrap();
        assert_eq!(r.best_code, SparseCode::zeros(6));
        assert_eq!(r.best_energy, 0.0);
    }

    #[test]
    fn refuses_large_problems() {
        assert!(matches!(
            solve_exhaustive(&QuboProblem::zero(30)),
            Err(Error::TooLarge { n: 30, max: 26 })
        ));
    }
}
