//! Mining the shape of expertise (T-shaped, C-shaped, non-expert) from
//! community question-answering data, and ranking T-shaped experts per
//! skill area with a two-branch convolutional matching model.
//!
//! The crate is organised bottom-up:
//!
//! * [`corpus`] ingests posts from dump XML or JSONL and indexes them.
//! * [`labels`] extracts skill areas, scores users and builds the golden set.
//! * [`embedding`] maps answers to topic-proportion vectors with LDA.
//! * [`nn`] holds the dual CNN, its exact backward pass and the trainer.
//! * [`eval`] ranks candidates and computes NDCG / ERR / MRR and t-tests.
//! * [`pipeline`] wires the stages together with a content-hash cache and
//!   generates synthetic corpora with planted expertise shapes.
//!
//! The numeric core ([`nn`], [`eval::metrics`], [`eval::stats`]) is generic
//! over [`Real`]; the aliases below fix the scalar for everyday use.

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod labels;
pub mod nn;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Dual CNN in double precision; the pipeline and checkpoints use this.
pub type Model = nn::DualCnn<f64>;
/// Single-precision variant of [`Model`].
pub type ModelF32 = nn::DualCnn<f32>;
/// Look-up embedding matrix in double precision.
pub type Embedding = nn::EmbeddingMatrix<f64>;
/// Gradient set matching [`Model`].
pub type Gradients = nn::Params<f64>;
