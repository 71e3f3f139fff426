use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layers::conv_raw;
use super::params::BranchParams;
use super::{maxpool, EmbeddingMatrix, ModelConfig, Params};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two parallel CNN branches (candidate documents, query documents) whose
/// latent vectors meet in three integration neurons:
///
/// * `o1 = act(w1 · (Lc · Lq) + b1)`
/// * `o2 = act(w2 · [Lc; Lq] + b2)`
/// * `o3 = tanh(w3 · [o1, o2] + b3)`
///
/// Each branch is conv → max-pool → concat → fully connected → tanh.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCnn<T> {
    config: ModelConfig,
    params: Params<T>,
}

/// Latent vectors and integration outputs of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Output<T> {
    pub candidate_latent: Vec<T>,
    pub query_latent: Vec<T>,
    pub o1: T,
    pub o2: T,
    pub o3: T,
}

#[derive(Debug, Clone)]
struct BranchCache<T> {
    /// Pre-activations of the conv maps, `k × conv_len`.
    z: Vec<T>,
    h: Vec<T>,
    /// Conv position feeding each pooled value, per filter.
    argmax: Vec<usize>,
    pooled: Vec<T>,
    latent: Vec<T>,
}

/// Everything `backward` needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    candidate: BranchCache<T>,
    query: BranchCache<T>,
    dot: T,
    a1: T,
    a2: T,
    output: Output<T>,
}

impl<T> ForwardCache<T> {
    pub fn output(&self) -> &Output<T> {
        &self.output
    }
}

impl<T: Real> DualCnn<T> {
    /// Fresh model with seeded Glorot-uniform weights.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let params = Params::init(&config, &mut rng);
        Ok(DualCnn { config, params })
    }

    pub fn from_params(config: ModelConfig, params: Params<T>) -> Result<Self> {
        config.validate()?;
        let expected = Params::<T>::zeros(&config);
        for (i, (a, b)) in expected.tensors().iter().zip(params.tensors()).enumerate() {
            if a.len() != b.len() {
                return Err(Error::Shape(format!(
                    "{}: expected {} values, got {}",
                    super::params::TENSOR_NAMES[i],
                    a.len(),
                    b.len()
                )));
            }
        }
        Ok(DualCnn { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Params<T> {
        &mut self.params
    }

    fn check_input(&self, e: &EmbeddingMatrix<T>, side: &str) -> Result<()> {
        if e.rows() != self.config.n || e.cols() != self.config.m_d {
            return Err(Error::Shape(format!(
                "{side} matrix is {}x{}, model expects {}x{}",
                e.rows(),
                e.cols(),
                self.config.n,
                self.config.m_d
            )));
        }
        Ok(())
    }

    fn branch_forward(&self, bp: &BranchParams<T>, e: &EmbeddingMatrix<T>) -> Result<BranchCache<T>> {
        let c = &self.config;
        let (z, h) = conv_raw(e, &bp.filters, &bp.filter_bias, c.f, c.activation)?;
        let len = c.conv_len();
        let mut pooled = Vec::with_capacity(c.fc_inputs());
        let mut argmax = Vec::with_capacity(c.fc_inputs());
        for j in 0..c.k {
            let p = maxpool(&h[j * len..(j + 1) * len], c.p)?;
            pooled.extend(p.values);
            argmax.extend(p.argmax);
        }
        let width = c.fc_inputs();
        let latent = (0..c.latent())
            .map(|o| {
                let w = &bp.fc_weight[o * width..(o + 1) * width];
                w.iter()
                    .zip(&pooled)
                    .fold(bp.fc_bias[o], |acc, (&a, &b)| acc + a * b)
                    .tanh()
            })
            .collect();
        Ok(BranchCache {
            z,
            h,
            argmax,
            pooled,
            latent,
        })
    }

    /// Forward pass keeping the intermediates for [`DualCnn::backward`].
    pub fn forward_cached(
        &self,
        candidate: &EmbeddingMatrix<T>,
        query: &EmbeddingMatrix<T>,
    ) -> Result<ForwardCache<T>> {
        self.check_input(candidate, "candidate")?;
        self.check_input(query, "query")?;
        let act = self.config.activation;
        let p = &self.params;
        let cb = self.branch_forward(&p.candidate, candidate)?;
        let qb = self.branch_forward(&p.query, query)?;

        let dot: T = cb.latent.iter().zip(&qb.latent).map(|(&a, &b)| a * b).sum();
        let a1 = p.dot_weight[0] * dot + p.dot_bias[0];
        let o1 = act.apply(a1);
        let m = self.config.latent();
        let a2 = cb
            .latent
            .iter()
            .chain(&qb.latent)
            .zip(&p.concat_weight)
            .fold(p.concat_bias[0], |acc, (&x, &w)| acc + x * w);
        let o2 = act.apply(a2);
        let o3 = (p.out_weight[0] * o1 + p.out_weight[1] * o2 + p.out_bias[0]).tanh();
        debug_assert_eq!(p.concat_weight.len(), 2 * m);

        let output = Output {
            candidate_latent: cb.latent.clone(),
            query_latent: qb.latent.clone(),
            o1,
            o2,
            o3,
        };
        Ok(ForwardCache {
            candidate: cb,
            query: qb,
            dot,
            a1,
            a2,
            output,
        })
    }

    pub fn forward(&self, candidate: &EmbeddingMatrix<T>, query: &EmbeddingMatrix<T>) -> Result<Output<T>> {
        Ok(self.forward_cached(candidate, query)?.output)
    }

    /// Scalar ranking score `o3`.
    pub fn score(&self, candidate: &EmbeddingMatrix<T>, query: &EmbeddingMatrix<T>) -> Result<T> {
        Ok(self.forward(candidate, query)?.o3)
    }

    fn branch_backward(
        &self,
        bp: &BranchParams<T>,
        cache: &BranchCache<T>,
        e: &EmbeddingMatrix<T>,
        d_latent: &[T],
        grad: &mut BranchParams<T>,
    ) {
        let c = &self.config;
        let width = c.fc_inputs();
        let mut d_pooled = vec![T::zero(); width];
        for o in 0..c.latent() {
            let l = cache.latent[o];
            let du = d_latent[o] * (T::one() - l * l);
            if du == T::zero() {
                continue;
            }
            grad.fc_bias[o] = grad.fc_bias[o] + du;
            let row = o * width;
            for i in 0..width {
                grad.fc_weight[row + i] = grad.fc_weight[row + i] + du * cache.pooled[i];
                d_pooled[i] = d_pooled[i] + du * bp.fc_weight[row + i];
            }
        }

        let len = c.conv_len();
        let pooled_len = c.pooled_len();
        let fw = c.f * c.m_d;
        for j in 0..c.k {
            for t in 0..pooled_len {
                let idx = j * pooled_len + t;
                let r = cache.argmax[idx];
                let zi = j * len + r;
                let dz = d_pooled[idx] * c.activation.derivative(cache.z[zi], cache.h[zi]);
                if dz == T::zero() {
                    continue;
                }
                grad.filter_bias[j] = grad.filter_bias[j] + dz;
                let window = e.window(r, c.f);
                let gf = &mut grad.filters[j * fw..(j + 1) * fw];
                for (g, &x) in gf.iter_mut().zip(window) {
                    *g = *g + dz * x;
                }
            }
        }
    }

    /// Gradient of `(o3 - target)^2` with respect to every parameter.
    pub fn backward(
        &self,
        cache: &ForwardCache<T>,
        candidate: &EmbeddingMatrix<T>,
        query: &EmbeddingMatrix<T>,
        target: T,
    ) -> Params<T> {
        let act = self.config.activation;
        let p = &self.params;
        let out = &cache.output;
        let mut g = Params::zeros(&self.config);

        let two = T::one() + T::one();
        let da3 = two * (out.o3 - target) * (T::one() - out.o3 * out.o3);
        g.out_weight[0] = da3 * out.o1;
        g.out_weight[1] = da3 * out.o2;
        g.out_bias[0] = da3;

        let da1 = da3 * p.out_weight[0] * act.derivative(cache.a1, out.o1);
        let da2 = da3 * p.out_weight[1] * act.derivative(cache.a2, out.o2);
        g.dot_weight[0] = da1 * cache.dot;
        g.dot_bias[0] = da1;
        g.concat_bias[0] = da2;

        let m = self.config.latent();
        let lc = &cache.candidate.latent;
        let lq = &cache.query.latent;
        let ddot = da1 * p.dot_weight[0];
        let mut d_lc = vec![T::zero(); m];
        let mut d_lq = vec![T::zero(); m];
        for i in 0..m {
            g.concat_weight[i] = da2 * lc[i];
            g.concat_weight[m + i] = da2 * lq[i];
            d_lc[i] = ddot * lq[i] + da2 * p.concat_weight[i];
            d_lq[i] = ddot * lc[i] + da2 * p.concat_weight[m + i];
        }

        self.branch_backward(&p.candidate, &cache.candidate, candidate, &d_lc, &mut g.candidate);
        self.branch_backward(&p.query, &cache.query, query, &d_lq, &mut g.query);
        g
    }

    /// Squared error and its gradient for one pair.
    pub fn loss_and_gradient(
        &self,
        candidate: &EmbeddingMatrix<T>,
        query: &EmbeddingMatrix<T>,
        target: T,
    ) -> Result<(T, Params<T>)> {
        let cache = self.forward_cached(candidate, query)?;
        let diff = cache.output.o3 - target;
        let grad = self.backward(&cache, candidate, query, target);
        Ok((diff * diff, grad))
    }

    pub fn loss(&self, candidate: &EmbeddingMatrix<T>, query: &EmbeddingMatrix<T>, target: T) -> Result<T> {
        let d = self.score(candidate, query)? - target;
        Ok(d * d)
    }
}
