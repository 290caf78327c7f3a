use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::code::SparseCode;
use crate::error::{check_dim, Error, Result};

/// Slack on the unit-norm bound. A column is only rescaled when its norm
/// exceeds `1 + NORM_SLACK`, which keeps projection exactly idempotent.
pub const NORM_SLACK: f64 = 1e-12;

/// A `D × N_q` matrix whose columns (atoms) have Euclidean norm at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: DMatrix<f64>,
}

impl Dictionary {
    /// Wraps a matrix that already satisfies the norm bound.
    pub fn new(atoms: DMatrix<f64>) -> Result<Self> {
        if atoms.nrows() == 0 {
            return Err(Error::Empty("dictionary has no rows"));
        }
        if atoms.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dictionary"));
        }
        if let Some((j, n)) = atoms
            .column_iter()
            .map(|c| c.norm())
            .enumerate()
            .find(|&(_, n)| n > 1.0 + NORM_SLACK)
        {
            return Err(Error::InvalidArgument(format!(
                "dictionary column {j} has norm {n} > 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Projects an arbitrary finite matrix onto the feasible set.
    pub fn from_projected(atoms: DMatrix<f64>) -> Result<Self> {
        if atoms.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dictionary"));
        }
        Self::new(project_columns(atoms))
    }

    /// Entries uniform in `[-1, 1]`, then projected.
    pub fn random<R: Rng + ?Sized>(dim: usize, n_atoms: usize, rng: &mut R) -> Result<Self> {
        let m = DMatrix::from_fn(dim, n_atoms, |_, _| rng.random_range(-1.0..=1.0));
        Self::from_projected(m)
    }

    /// Input dimension `D`.
    pub fn dim(&self) -> usize {
        self.atoms.nrows()
    }

    /// Number of atoms `N_q`.
    pub fn n_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    /// `N_q / D`.
    pub fn overcompleteness(&self) -> f64 {
        self.n_atoms() as f64 / self.dim() as f64
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.atoms
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.atoms.column_iter().map(|c| c.norm()).collect()
    }

    /// `φ a`.
    pub fn reconstruct(&self, code: &SparseCode) -> Result<DVector<f64>> {
        check_dim(self.n_atoms(), code.len())?;
        let mut out = DVector::zeros(self.dim());
        for j in code.active() {
            out += self.atoms.column(j);
        }
        Ok(out)
    }
}

/// Rescales every column with norm above one to unit norm. Other columns,
/// including zero columns, pass through bit-for-bit.
pub fn project_columns(mut atoms: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in atoms.column_iter_mut() {
        let n = col.norm();
        if n > 1.0 + NORM_SLACK {
            col /= n;
        }
    }
    atoms
}
