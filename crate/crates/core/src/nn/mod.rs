//! The two-branch convolutional matching model, its exact backward pass,
//! an Adam trainer and the `ESM-CNN-v1` checkpoint format.

mod checkpoint;
mod config;
mod layers;
mod matrix;
mod model;
mod params;
mod train;

pub use checkpoint::{decode_model, encode_model, load_model, save_model, CNN_MAGIC};
pub use config::{Activation, Loss, ModelConfig, TrainConfig};
pub use layers::{conv_forward, maxpool, Pooled};
pub use matrix::{build_embedding_matrix, EmbeddingMatrix};
pub use model::{DualCnn, ForwardCache, Output};
pub use params::{BranchParams, Params, TENSOR_NAMES};
pub use train::{candidate_matrix, fit, query_matrix, train, Adam, EpochLog, Example, PairDataset, TrainReport};
