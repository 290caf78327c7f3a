//! Chimera hardware graphs, clique minor embedding, and solving logical
//! Ising problems through chains of physical qubits.

mod embed;
mod graph;
mod mask;
mod solve;

pub use embed::{clique_capacity, embed_complete, Embedding};
pub use graph::{build_chimera, ChimeraCoord, HardwareGraph, CELL, SHORE};
pub use mask::HardwareMask;
pub use solve::{
    default_chain_strengths, embed_ising, solve_embedded, unembed, ChainBreakStats, ChainStrength,
    EmbeddedIsing, EmbeddedSolve,
};

#[cfg(test)]
mod tests;
