//! Exact computation with clubs: linear sets of PG(1, q^n) with one heavy point,
//! their polynomial descriptions, and the blocking sets, KM-arcs and rank-metric
//! codes built from them.

pub mod cli;
pub mod constructions;
pub mod equivalence;
pub mod error;
pub mod geomapps;
pub mod gfcore;
pub mod linalg;
pub mod linpoly;
pub mod rankmetric;
pub mod subspaces;

pub use error::{Error, Result};
pub use gfcore::{Felt, FieldCtx};
