use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Qubits per unit-cell shore.
pub const SHORE: usize = 4;
/// Qubits per unit cell.
pub const CELL: usize = 2 * SHORE;

/// Position of a qubit: unit cell `(row, col)`, shore `0` (vertical, the
/// "left" half of the cell) or `1` (horizontal), and index `k` within the
/// shore. Linear index is `((row·cols + col)·2 + shore)·4 + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChimeraCoord {
    pub row: usize,
    pub col: usize,
    pub shore: usize,
    pub k: usize,
}

/// Chimera topology: a grid of `K_{4,4}` cells. Vertical qubits also couple
/// to the same-index vertical qubit in the cells above and below; horizontal
/// qubits to the cells left and right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareGraph {
    rows: usize,
    cols: usize,
    inoperable_qubits: BTreeSet<usize>,
    inoperable_couplers: BTreeSet<(usize, usize)>,
}

pub fn build_chimera(
    rows: usize,
    cols: usize,
    inoperable_qubits: impl IntoIterator<Item = usize>,
    inoperable_couplers: impl IntoIterator<Item = (usize, usize)>,
) -> Result<HardwareGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("chimera grid needs at least one cell".into()));
    }
    let mut g = HardwareGraph {
        rows,
        cols,
        inoperable_qubits: BTreeSet::new(),
        inoperable_couplers: BTreeSet::new(),
    };
    let sites = g.sites();
    for q in inoperable_qubits {
        if q >= sites {
            return Err(Error::IndexOutOfRange { index: q, limit: sites });
        }
        g.inoperable_qubits.insert(q);
    }
    for (a, b) in inoperable_couplers {
        for q in [a, b] {
            if q >= sites {
                return Err(Error::IndexOutOfRange { index: q, limit: sites });
            }
        }
        if !g.is_lattice_edge(a, b) {
            return Err(Error::InvalidArgument(format!("({a}, {b}) is not a chimera coupler")));
        }
        g.inoperable_couplers.insert((a.min(b), a.max(b)));
    }
    Ok(g)
}

impl HardwareGraph {
    pub fn perfect(rows: usize, cols: usize) -> Result<Self> {
        build_chimera(rows, cols, [], [])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn inoperable_qubits(&self) -> &BTreeSet<usize> {
        &self.inoperable_qubits
    }

    pub fn inoperable_couplers(&self) -> &BTreeSet<(usize, usize)> {
        &self.inoperable_couplers
    }

    pub fn is_perfect(&self) -> bool {
        self.inoperable_qubits.is_empty() && self.inoperable_couplers.is_empty()
    }

    /// Number of qubit sites, operable or not (`8·rows·cols`).
    pub fn sites(&self) -> usize {
        CELL * self.rows * self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.sites() - self.inoperable_qubits.len()
    }

    pub fn linear(&self, c: ChimeraCoord) -> usize {
        ((c.row * self.cols + c.col) * 2 + c.shore) * SHORE + c.k
    }

    pub fn coord(&self, q: usize) -> ChimeraCoord {
        let k = q % SHORE;
        let shore = q / SHORE % 2;
        let cell = q / CELL;
        ChimeraCoord {
            row: cell / self.cols,
            col: cell % self.cols,
            shore,
            k,
        }
    }

    pub fn is_active(&self, q: usize) -> bool {
        q < self.sites() && !self.inoperable_qubits.contains(&q)
    }

    fn is_lattice_edge(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (self.coord(a), self.coord(b));
        if (ca.row, ca.col) == (cb.row, cb.col) {
            return ca.shore != cb.shore;
        }
        if ca.shore != cb.shore || ca.k != cb.k {
            return false;
        }
        match ca.shore {
            0 => ca.col == cb.col && ca.row.abs_diff(cb.row) == 1,
            _ => ca.row == cb.row && ca.col.abs_diff(cb.col) == 1,
        }
    }

    pub fn has_coupler(&self, a: usize, b: usize) -> bool {
        self.is_active(a)
            && self.is_active(b)
            && self.is_lattice_edge(a, b)
            && !self.inoperable_couplers.contains(&(a.min(b), a.max(b)))
    }

    /// Operable neighbors of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        if !self.is_active(q) {
            return Vec::new();
        }
        let c = self.coord(q);
        let mut out = Vec::with_capacity(6);
        for k in 0..SHORE {
            out.push(self.linear(ChimeraCoord { shore: 1 - c.shore, k, ..c }));
        }
        if c.shore == 0 {
            if c.row > 0 {
                out.push(self.linear(ChimeraCoord { row: c.row - 1, ..c }));
            }
            if c.row + 1 < self.rows {
                out.push(self.linear(ChimeraCoord { row: c.row + 1, ..c }));
            }
        } else {
            if c.col > 0 {
                out.push(self.linear(ChimeraCoord { col: c.col - 1, ..c }));
            }
            if c.col + 1 < self.cols {
                out.push(self.linear(ChimeraCoord { col: c.col + 1, ..c }));
            }
        }
        out.retain(|&p| self.has_coupler(q, p));
        out.sort_unstable();
        out
    }

    /// Every operable coupler as `(a, b)` with `a < b`, sorted.
    pub fn couplers(&self) -> Vec<(usize, usize)> {
        (0..self.sites())
            .flat_map(|a| self.neighbors(a).into_iter().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }
}
