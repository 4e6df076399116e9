//! Node-blocking games on directed acyclic graphs.
//!
//! The crate provides the game rules, an exact win/loss solver, a QBF model
//! with a brute-force evaluator, the compilation of restricted QBFs into
//! node-blocking instances, and a harness that checks the two agree.

pub mod digraph;
pub mod game;
pub mod harness;
pub mod nbg;
pub mod qbf;
pub mod reduction;
pub mod solver;

pub use digraph::{Digraph, GraphError, VertexId};
pub use game::{Cell, GameError, GameState, IllegalReason, Move, Player, Trace};
pub use qbf::{QbfError, QbfFormula, RestrictedQbf};
pub use reduction::{ReductionArtifact, ReductionError, RoleLabel};
pub use solver::{Outcome, SolveError, SolveLimits, SolveReport};
