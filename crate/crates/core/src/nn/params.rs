use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ModelConfig;
use crate::scalar::Real;

/// Learnable tensors of one branch (candidate or query).
#[derive(Debug, Clone, PartialEq)]
pub struct BranchParams<T> {
    /// `k × f × m_d`, row-major per filter.
    pub filters: Vec<T>,
    pub filter_bias: Vec<T>,
    /// `m × (k · pooled_len)`, row-major.
    pub fc_weight: Vec<T>,
    pub fc_bias: Vec<T>,
}

/// Every parameter of the model. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    pub candidate: BranchParams<T>,
    pub query: BranchParams<T>,
    /// Weight and bias of `o1` on the latent dot product.
    pub dot_weight: Vec<T>,
    pub dot_bias: Vec<T>,
    /// Weights (`2m`) and bias of `o2` on the concatenated latents.
    pub concat_weight: Vec<T>,
    pub concat_bias: Vec<T>,
    /// Weights on `[o1, o2]` and bias of `o3`.
    pub out_weight: Vec<T>,
    pub out_bias: Vec<T>,
}

pub const TENSOR_NAMES: [&str; 14] = [
    "candidate.filters",
    "candidate.filter_bias",
    "candidate.fc_weight",
    "candidate.fc_bias",
    "query.filters",
    "query.filter_bias",
    "query.fc_weight",
    "query.fc_bias",
    "dot_weight",
    "dot_bias",
    "concat_weight",
    "concat_bias",
    "out_weight",
    "out_bias",
];

impl<T: Real> BranchParams<T> {
    fn zeros(c: &ModelConfig) -> Self {
        BranchParams {
            filters: vec![T::zero(); c.k * c.f * c.m_d],
            filter_bias: vec![T::zero(); c.k],
            fc_weight: vec![T::zero(); c.latent() * c.fc_inputs()],
            fc_bias: vec![T::zero(); c.latent()],
        }
    }
}

fn glorot<T: Real>(rng: &mut ChaCha8Rng, out: &mut [T], fan_in: usize, fan_out: usize) {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for w in out {
        *w = T::of(rng.gen_range(-limit..limit));
    }
}

impl<T: Real> Params<T> {
    pub fn zeros(c: &ModelConfig) -> Self {
        let m = c.latent();
        Params {
            candidate: BranchParams::zeros(c),
            query: BranchParams::zeros(c),
            dot_weight: vec![T::zero()],
            dot_bias: vec![T::zero()],
            concat_weight: vec![T::zero(); 2 * m],
            concat_bias: vec![T::zero()],
            out_weight: vec![T::zero(); 2],
            out_bias: vec![T::zero()],
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(c: &ModelConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut p = Params::zeros(c);
        for b in [&mut p.candidate, &mut p.query] {
            glorot(rng, &mut b.filters, c.f * c.m_d, c.k);
            glorot(rng, &mut b.fc_weight, c.fc_inputs(), c.latent());
        }
        glorot(rng, &mut p.dot_weight, 1, 1);
        glorot(rng, &mut p.concat_weight, 2 * c.latent(), 1);
        glorot(rng, &mut p.out_weight, 2, 1);
        p
    }

    pub fn tensors(&self) -> [&[T]; 14] {
        [
            &self.candidate.filters,
            &self.candidate.filter_bias,
            &self.candidate.fc_weight,
            &self.candidate.fc_bias,
            &self.query.filters,
            &self.query.filter_bias,
            &self.query.fc_weight,
            &self.query.fc_bias,
            &self.dot_weight,
            &self.dot_bias,
            &self.concat_weight,
            &self.concat_bias,
            &self.out_weight,
            &self.out_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<T>; 14] {
        [
            &mut self.candidate.filters,
            &mut self.candidate.filter_bias,
            &mut self.candidate.fc_weight,
            &mut self.candidate.fc_bias,
            &mut self.query.filters,
            &mut self.query.filter_bias,
            &mut self.query.fc_weight,
            &mut self.query.fc_bias,
            &mut self.dot_weight,
            &mut self.dot_bias,
            &mut self.concat_weight,
            &mut self.concat_bias,
            &mut self.out_weight,
            &mut self.out_bias,
        ]
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &Params<T>, scale: T) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d + scale * s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> T {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }
}
