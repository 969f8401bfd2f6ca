//! Exact coloring counts for signed graphs.
//!
//! A signed graph pairs an undirected multigraph with an edge sign function
//! `σ: E → {+1, -1}`. A proper coloring draws colors from the symmetric
//! palette `M_k` (see [`counting::color_set`]) and must satisfy
//! `c(u) != σ(e)·c(v)` across every edge `e = uv`. This crate counts proper
//! and list colorings exactly by three independent routes — brute force,
//! inclusion-exclusion over spanning subgraphs, and a broken-circuit
//! expansion — assembles the chromatic quasi-polynomial pair (one polynomial
//! for odd `k`, one for even), and searches bounded families of list
//! assignments for counts below the canonical one.

pub mod circuits;
pub mod cli;
pub mod counting;
pub mod extremal;
pub mod graph;

use thiserror::Error;

pub use counting::Count;

/// Vertex index, `0..n`.
pub type Vertex = usize;

/// Edge position in the input order, `0..m`.
pub type EdgeId = usize;

/// Widest edge set representable; [`graph::EdgeSet`] is a 64-bit mask.
pub const MAX_EDGES: usize = 64;

/// Guards for the exponential enumerations.
///
/// The subset routines walk up to `2^m` spanning subgraphs and the circuit
/// routines can blow up on dense graphs, so both are capped. Callers that
/// know what they are doing can raise the caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `m` for which `2^m` subset enumeration is attempted.
    pub subset_edges: usize,
    /// Largest number of circuits enumerated before giving up.
    pub circuits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { subset_edges: 20, circuits: 100_000 }
    }
}

/// An enumeration refused to run because it would exceed a cap.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResourceError {
    #[error("graph has m = {m} edges; 2^m subset enumeration is capped at m <= {cap}")]
    SubsetCap { m: usize, cap: usize },
    #[error("circuit enumeration exceeded the cap of {cap} circuits")]
    CircuitCap { cap: usize },
    #[error("graph has m = {m} edges; edge bitsets support at most 64")]
    EdgeWidth { m: usize },
    #[error("exhaustive search needs {needed} evaluations but the budget is {budget}")]
    SearchBudget { needed: u128, budget: u128 },
}
