use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{build_embedding_matrix, DualCnn, EmbeddingMatrix, ModelConfig, Params, TrainConfig};
use crate::corpus::{Corpus, PostId, UserId};
use crate::embedding::DocVector;
use crate::error::{Error, Result};
use crate::labels::{GoldenPair, SkillArea, Split};
use crate::scalar::Real;

fn lookup(vectors: &BTreeMap<PostId, DocVector>, id: PostId) -> Result<&[f64]> {
    vectors
        .get(&id)
        .map(DocVector::values)
        .ok_or_else(|| Error::invalid(format!("no embedding for post {id}")))
}

/// `E` for a candidate: their answers, oldest first, padded or cut to `n`.
pub fn candidate_matrix<T: Real>(
    corpus: &Corpus,
    user: UserId,
    vectors: &BTreeMap<PostId, DocVector>,
    n: usize,
    m_d: usize,
) -> Result<EmbeddingMatrix<T>> {
    let docs = corpus
        .documents_of_user(user)
        .into_iter()
        .take(n)
        .map(|p| lookup(vectors, p.post_id))
        .collect::<Result<Vec<_>>>()?;
    build_embedding_matrix(&docs, n, m_d)
}

/// `E` for a query: the skill area's answers, oldest first.
pub fn query_matrix<T: Real>(
    skill: &SkillArea,
    vectors: &BTreeMap<PostId, DocVector>,
    n: usize,
    m_d: usize,
) -> Result<EmbeddingMatrix<T>> {
    let docs = skill
        .documents
        .iter()
        .take(n)
        .map(|&id| lookup(vectors, id))
        .collect::<Result<Vec<_>>>()?;
    build_embedding_matrix(&docs, n, m_d)
}

/// One labelled pair, by index into [`PairDataset`]'s matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub candidate: usize,
    pub query: usize,
    pub target: f64,
}

/// Pre-built input matrices plus the train / validation / test pairs.
#[derive(Debug, Clone)]
pub struct PairDataset<T> {
    pub candidates: Vec<EmbeddingMatrix<T>>,
    pub queries: Vec<EmbeddingMatrix<T>>,
    pub train: Vec<Example>,
    pub validation: Vec<Example>,
    pub test: Vec<Example>,
}

impl<T: Real> PairDataset<T> {
    pub fn from_golden(
        golden: &[GoldenPair],
        corpus: &Corpus,
        skills: &[SkillArea],
        vectors: &BTreeMap<PostId, DocVector>,
        n: usize,
        m_d: usize,
    ) -> Result<Self> {
        let skill_idx: HashMap<&str, usize> = skills.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
        let queries = skills
            .iter()
            .map(|s| query_matrix(s, vectors, n, m_d))
            .collect::<Result<Vec<_>>>()?;

        let mut users: Vec<UserId> = golden.iter().map(|g| g.user).collect();
        users.sort();
        users.dedup();
        let user_idx: HashMap<UserId, usize> = users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let candidates = users
            .par_iter()
            .map(|&u| candidate_matrix(corpus, u, vectors, n, m_d))
            .collect::<Result<Vec<_>>>()?;

        let mut data = PairDataset {
            candidates,
            queries,
            train: Vec::new(),
            validation: Vec::new(),
            test: Vec::new(),
        };
        for g in golden {
            let query = *skill_idx
                .get(g.skill.as_str())
                .ok_or_else(|| Error::invalid(format!("golden pair names unknown skill `{}`", g.skill)))?;
            let ex = Example {
                candidate: user_idx[&g.user],
                query,
                target: f64::from(g.target),
            };
            match g.split {
                Split::Train => data.train.push(ex),
                Split::Validation => data.validation.push(ex),
                Split::Test => data.test.push(ex),
            }
        }
        Ok(data)
    }

    fn pair(&self, ex: &Example) -> (&EmbeddingMatrix<T>, &EmbeddingMatrix<T>) {
        (&self.candidates[ex.candidate], &self.queries[ex.query])
    }

    /// Mean squared error of `model` over `examples`.
    pub fn mean_loss(&self, model: &DualCnn<T>, examples: &[Example]) -> Result<f64> {
        if examples.is_empty() {
            return Ok(0.0);
        }
        let losses = examples
            .par_iter()
            .map(|ex| {
                let (c, q) = self.pair(ex);
                model.loss(c, q, T::of(ex.target))
            })
            .collect::<Result<Vec<T>>>()?;
        let total: f64 = losses.iter().map(|l| l.to_f64_lossy()).sum();
        Ok(total / examples.len() as f64)
    }

    /// Batch-mean loss and gradient; per-pair work runs in parallel and is
    /// summed in example order.
    pub fn batch_gradient(&self, model: &DualCnn<T>, batch: &[Example]) -> Result<(f64, Params<T>)> {
        let parts = batch
            .par_iter()
            .map(|ex| {
                let (c, q) = self.pair(ex);
                model.loss_and_gradient(c, q, T::of(ex.target))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grad = Params::zeros(model.config());
        let mut loss = 0.0;
        let scale = T::one() / T::of_usize(batch.len().max(1));
        for (l, g) in &parts {
            loss += l.to_f64_lossy();
            grad.add_scaled(g, scale);
        }
        Ok((loss / batch.len().max(1) as f64, grad))
    }
}

/// Adam with the usual `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
    step: i32,
    m: Params<T>,
    v: Params<T>,
}

impl<T: Real> Adam<T> {
    pub fn new(model: &DualCnn<T>, learning_rate: f64) -> Self {
        Adam {
            lr: T::of(learning_rate),
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(1e-8),
            step: 0,
            m: Params::zeros(model.config()),
            v: Params::zeros(model.config()),
        }
    }

    pub fn update(&mut self, params: &mut Params<T>, grad: &Params<T>) {
        self.step += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.step);
        let c2 = one - self.beta2.powi(self.step);
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut())
            .zip(grad.tensors());
        for (((p, m), v), g) in tensors {
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (one - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (one - self.beta2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p[i] = p[i] - self.lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochLog>,
    /// Epoch whose parameters were kept (1-based).
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub stopped_early: bool,
    /// Restart that produced the model (0-based); its init seed is
    /// `ModelConfig::seed + restart`.
    pub restart: usize,
}

impl TrainReport {
    /// `epoch,train_loss,val_loss`
    pub fn log_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for e in &self.history {
            let _ = writeln!(out, "{},{},{}", e.epoch, e.train_loss, e.val_loss);
        }
        out
    }
}

/// Mini-batch Adam on the train split with early stopping on validation
/// loss. The model ends up holding the best-on-validation parameters.
pub fn train<T: Real>(model: &mut DualCnn<T>, data: &PairDataset<T>, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if data.train.is_empty() {
        return Err(Error::invalid("training split is empty"));
    }
    if data.validation.is_empty() {
        return Err(Error::invalid("validation split is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(model, cfg.learning_rate);
    let mut order = data.train.clone();
    let mut best = (model.params().clone(), f64::INFINITY, 0usize);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut stopped_early = false;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let (_, grad) = data.batch_gradient(model, batch)?;
            adam.update(model.params_mut(), &grad);
            if !model.params().is_finite() {
                return Err(Error::invalid(format!("non-finite parameters in epoch {epoch}")));
            }
        }
        let train_loss = data.mean_loss(model, &data.train)?;
        let val_loss = data.mean_loss(model, &data.validation)?;
        history.push(EpochLog {
            epoch,
            train_loss,
            val_loss,
        });
        if val_loss < best.1 {
            best = (model.params().clone(), val_loss, epoch);
        } else if epoch - best.2 >= cfg.patience.max(1) {
            stopped_early = true;
            break;
        }
    }

    *model.params_mut() = best.0;
    Ok(TrainReport {
        history,
        best_epoch: best.2,
        best_val_loss: best.1,
        stopped_early,
        restart: 0,
    })
}

/// Trains `cfg.restarts` models initialised with seeds `model_cfg.seed`,
/// `model_cfg.seed + 1`, ... and keeps the one with the lowest validation
/// loss, earliest restart on ties.
pub fn fit<T: Real>(
    model_cfg: &ModelConfig,
    data: &PairDataset<T>,
    cfg: &TrainConfig,
) -> Result<(DualCnn<T>, TrainReport)> {
    cfg.validate()?;
    let mut best: Option<(DualCnn<T>, TrainReport)> = None;
    for restart in 0..cfg.restarts {
        let seeded = ModelConfig {
            seed: model_cfg.seed.wrapping_add(restart as u64),
            ..*model_cfg
        };
        let mut model = DualCnn::new(seeded)?;
        let mut report = train(&mut model, data, cfg)?;
        report.restart = restart;
        if best
            .as_ref()
            .is_none_or(|(_, b)| report.best_val_loss < b.best_val_loss)
        {
            best = Some((model, report));
        }
    }
    Ok(best.expect("restarts >= 1"))
}
