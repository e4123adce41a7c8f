//! Constructive embedding of almost-spanning bounded-degree graphs into
//! sparse random graphs.
//!
//! The pipeline splits a guest `H` into small components, a core `H_2` with
//! an ordered partition that an embedder can place class by class, and a
//! handful of short induced cycles that are re-inserted into reserved host
//! zones. Janson-bound calculators, hypergraph SDR tools and a seeded Monte
//! Carlo harness sit alongside.

// `!(x > y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cert;
pub mod cli;
pub mod cycles;
pub mod decomposition;
pub mod embedding;
pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod janson;
pub mod matching;
pub mod partition;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{Cycle, Graph, VertexMap, VertexSet};
pub use rng::Seed;
