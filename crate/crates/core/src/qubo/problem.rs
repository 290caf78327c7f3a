use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::code::SparseCode;
use crate::dictionary::Dictionary;
use crate::energy::SparsityPenalty;
use crate::error::{check_dim, Error, Result};

/// One pairwise coefficient, always stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl Coupling {
    pub fn new(i: usize, j: usize, value: f64) -> Self {
        Self { i, j, value }
    }
}

/// Orders each pair as `i < j`, sorts, and merges repeated pairs by summing.
fn normalize(n: usize, raw: impl IntoIterator<Item = Coupling>) -> Result<Vec<Coupling>> {
    let mut out: Vec<Coupling> = Vec::new();
    for c in raw {
        if c.i == c.j {
            return Err(Error::InvalidArgument(format!("diagonal coupling ({}, {})", c.i, c.j)));
        }
        let (i, j) = if c.i < c.j { (c.i, c.j) } else { (c.j, c.i) };
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, limit: n });
        }
        if !c.value.is_finite() {
            return Err(Error::NonFinite("coupling"));
        }
        out.push(Coupling::new(i, j, c.value));
    }
    out.sort_by_key(|c| (c.i, c.j));
    out.dedup_by(|next, kept| {
        if next.i == kept.i && next.j == kept.j {
            kept.value += next.value;
            true
        } else {
            false
        }
    });
    Ok(out)
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `E(a) = offset + Σ q_i a_i + Σ_{i<j} Q_ij a_i a_j` over `a ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    linear: Vec<f64>,
    quadratic: Vec<Coupling>,
    offset: f64,
}

impl QuboProblem {
    pub fn new(
        linear: Vec<f64>,
        quadratic: impl IntoIterator<Item = Coupling>,
        offset: f64,
    ) -> Result<Self> {
        check_finite(&linear, "linear terms")?;
        check_finite(&[offset], "offset")?;
        let quadratic = normalize(linear.len(), quadratic)?;
        Ok(Self {
            linear,
            quadratic,
            offset,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            linear: vec![0.0; n],
            quadratic: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Coupling] {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `Q_ij` for any ordering of the pair; zero when absent.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        lookup(&self.quadratic, i, j)
    }

    pub fn energy(&self, code: &SparseCode) -> Result<f64> {
        qubo_energy(self, code)
    }

    /// Full symmetric `n × n` coupling matrix in row-major order, zero diagonal.
    pub fn dense_symmetric(&self) -> Vec<f64> {
        dense(self.n(), &self.quadratic)
    }

    pub fn to_ising(&self) -> IsingProblem {
        qubo_to_ising(self)
    }
}

/// `H(s) = offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s ∈ {−1,+1}^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    h: Vec<f64>,
    couplings: Vec<Coupling>,
    offset: f64,
}

impl IsingProblem {
    pub fn new(h: Vec<f64>, couplings: impl IntoIterator<Item = Coupling>, offset: f64) -> Result<Self> {
        check_finite(&h, "biases")?;
        check_finite(&[offset], "offset")?;
        let couplings = normalize(h.len(), couplings)?;
        Ok(Self { h, couplings, offset })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        lookup(&self.couplings, i, j)
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        ising_energy(self, spins)
    }

    /// Largest coefficient magnitude over biases and couplings.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.h
            .iter()
            .copied()
            .chain(self.couplings.iter().map(|c| c.value))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Adjacency lists `(neighbor, J)` per spin, neighbors in ascending order.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for c in &self.couplings {
            adj[c.i].push((c.j, c.value));
            adj[c.j].push((c.i, c.value));
        }
        for a in &mut adj {
            a.sort_by_key(|&(k, _)| k);
        }
        adj
    }
}

fn lookup(couplings: &[Coupling], i: usize, j: usize) -> f64 {
    let key = if i < j { (i, j) } else { (j, i) };
    couplings
        .binary_search_by_key(&key, |c| (c.i, c.j))
        .map(|k| couplings[k].value)
        .unwrap_or(0.0)
}

fn dense(n: usize, couplings: &[Coupling]) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    for c in couplings {
        w[c.i * n + c.j] = c.value;
        w[c.j * n + c.i] = c.value;
    }
    w
}

pub fn qubo_energy(qubo: &QuboProblem, code: &SparseCode) -> Result<f64> {
    check_dim(qubo.n(), code.len())?;
    let lin: f64 = code.active().map(|i| qubo.linear[i]).sum();
    let quad: f64 = qubo
        .quadratic
        .iter()
        .filter(|c| code.get(c.i) && code.get(c.j))
        .map(|c| c.value)
        .sum();
    Ok(qubo.offset + lin + quad)
}

pub fn ising_energy(ising: &IsingProblem, spins: &[i8]) -> Result<f64> {
    check_dim(ising.n(), spins.len())?;
    if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidArgument(format!("spin value {bad} is not ±1")));
    }
    let lin: f64 = ising.h.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
    let quad: f64 = ising
        .couplings
        .iter()
        .map(|c| c.value * (spins[c.i] * spins[c.j]) as f64)
        .sum();
    Ok(ising.offset + lin + quad)
}

/// Substitutes `a_i = (s_i + 1) / 2`; energies agree pointwise.
pub fn qubo_to_ising(qubo: &QuboProblem) -> IsingProblem {
    let mut h: Vec<f64> = qubo.linear.iter().map(|q| 0.5 * q).collect();
    let mut offset = qubo.offset + 0.5 * qubo.linear.iter().sum::<f64>();
    let mut couplings = Vec::with_capacity(qubo.quadratic.len());
    for c in &qubo.quadratic {
        let quarter = 0.25 * c.value;
        h[c.i] += quarter;
        h[c.j] += quarter;
        offset += quarter;
        couplings.push(Coupling::new(c.i, c.j, quarter));
    }
    IsingProblem {
        h,
        couplings,
        offset,
    }
}

/// Precomputed Gram matrix of a dictionary, for building many QUBOs against
/// the same atoms.
#[derive(Debug, Clone)]
pub struct QuboBuilder<'a> {
    dictionary: &'a Dictionary,
    gram: DMatrix<f64>,
}

impl<'a> QuboBuilder<'a> {
    pub fn new(dictionary: &'a Dictionary) -> Self {
        let m = dictionary.matrix();
        Self {
            dictionary,
            gram: m.transpose() * m,
        }
    }

    pub fn build(&self, x: &[f64], lambda: SparsityPenalty) -> Result<QuboProblem> {
        let d = self.dictionary;
        check_dim(d.dim(), x.len())?;
        check_finite(x, "input vector")?;
        let n = d.n_atoms();
        let m = d.matrix();
        let linear = (0..n)
            .map(|i| {
                let proj: f64 = m.column(i).iter().zip(x).map(|(a, b)| a * b).sum();
                lambda.value() + 0.5 * self.gram[(i, i)] - proj
            })
            .collect();
        let mut quadratic = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                quadratic.push(Coupling::new(i, j, self.gram[(i, j)]));
            }
        }
        let offset = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        Ok(QuboProblem {
            linear,
            quadratic,
            offset,
        })
    }
}

/// Exact binary expansion of `½‖x − φa‖² + λ|a|`:
/// `offset = ½‖x‖²`, `q_i = λ + ½‖φ_i‖² − φ_iᵀx`, `Q_ij = φ_iᵀφ_j`.
/// With unit-norm atoms the linear term is `λ + ½ − φ_iᵀx`.
pub fn build_qubo(dictionary: &Dictionary, x: &[f64], lambda: SparsityPenalty) -> Result<QuboProblem> {
    QuboBuilder::new(dictionary).build(x, lambda)
}
