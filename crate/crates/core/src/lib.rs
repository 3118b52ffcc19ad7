//! Approximation algorithms and exact oracles for minimum spanning tree
//! interdiction on weighted multigraphs.
//!
//! The solver rounds weights to powers of two, computes the extreme supported
//! points of the (cost, MST value) trade-off by parametric submodular
//! minimization, and either returns one of them or runs a greedy level-by-level
//! construction that turns an over-budget removal set into an interdiction set
//! with a provable fraction of its efficiency. The result is a 14-approximation.

pub mod extensions;
pub mod graph;
pub mod io;
pub mod levels;
pub mod pareto;
pub mod patterns;
pub mod sfm;
pub mod solver;

pub use graph::{Edge, EdgeId, EdgeSet, Instance, InstanceError};
