//! Reflection and cluster algorithms for lattice models with pairwise
//! interactions: Potts models, random surfaces, spin `O(n)` models, their
//! two-copy products and reversible Markov chains viewed as path models.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity, clippy::needless_range_loop)]

pub mod error;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod reflection;
pub mod samplers;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
