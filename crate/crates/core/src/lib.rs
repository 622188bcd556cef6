//! Dual complexes of integral box partitions and the questions around
//! embedding them: exact orientation checks, a search for half-integral
//! embeddings, a 3-SAT reduction to planar embedding, counterexample
//! generators and an exact hyperplane stabbing checker.

pub mod counterexamples;
pub mod dual;
pub mod embed;
pub mod error;
pub mod gadget;
pub mod io;
pub mod lp;
pub mod model;
pub mod orient;
pub mod reduction;
pub mod solver;
pub mod stab;

pub use error::{Error, Result};
