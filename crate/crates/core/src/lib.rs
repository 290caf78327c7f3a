//! Binary sparse coding on classical stand-ins for a quantum annealer.
//!
//! Sparse inference `min_a ½‖x − φa‖² + λ|a|` over `a ∈ {0,1}^N` is reduced
//! exactly to a QUBO / Ising problem and solved by exhaustive search,
//! simulated annealing, or simulated annealing on a Chimera hardware graph
//! through a clique minor embedding. Dictionaries are learned by alternating
//! inference with batch SGD, and regression is posed as inpainting the
//! missing last component of a concatenated `(x, y)` vector.

pub mod chimera;
pub mod code;
pub mod data;
pub mod dictionary;
pub mod energy;
pub mod error;
pub mod learn;
pub mod qubo;
pub mod regress;
pub mod sample;
pub mod seed;
pub mod standardize;

pub use code::SparseCode;
pub use dictionary::{project_columns, Dictionary};
pub use energy::{sc_energy, SparsityPenalty};
pub use error::{Error, ErrorKind, Result};
pub use sample::Sample;
pub use standardize::{standardize_apply, standardize_fit, standardize_invert, StandardizationStats};
pub use data::SyntheticConfig;
pub use learn::{LearnConfig, Solver, SolverConfig, TrainTrace, TuneOptions};
pub use qubo::{IsingProblem, QuboProblem, SolveResult};
pub use regress::{FitConfig, PredictionReport, PretrainSource, RegressionModel, ScalingFit};
