//! Synthesize text corpora from weighted base sentences, train tiny
//! skip-gram embeddings on them from scratch, and verify that the vectors
//! satisfy word relations such as `germany + capital ~= berlin`.
//!
//! Pipeline: a [`corpus::SentenceDistribution`] is sampled into a flat token
//! stream, [`skipgram::train`] fits input/output vector tables over it, and
//! the analysis modules interrogate the result — algebraic relations with
//! nearest-neighbor verification ([`relation`], [`analysis`]), plus discrete
//! context-set structure of the corpus itself ([`analysis`]). The
//! [`experiment`] module ties the stages together behind config files and
//! preset batches, and [`emit`] renders deterministic CSV/SVG/JSON artifacts.
//!
//! Everything downstream of a seed is reproducible bit for bit; see
//! [`rng`] for the generator contract.

pub mod analysis;
pub mod corpus;
pub mod emit;
pub mod error;
pub mod experiment;
pub mod relation;
pub mod rng;
pub mod skipgram;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
