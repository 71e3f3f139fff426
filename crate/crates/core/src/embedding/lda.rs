use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DocVector, DocumentEmbedder, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaConfig {
    pub num_topics: usize,
    /// Symmetric document-topic prior; `None` means `50 / num_topics`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub fold_in_sweeps: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            num_topics: 100,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            fold_in_sweeps: 50,
            seed: 1,
        }
    }
}

impl LdaConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.num_topics as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_topics < 2 {
            return Err(Error::invalid(format!(
                "num_topics must be >= 2, got {}",
                self.num_topics
            )));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        if self.fold_in_sweeps < 1 {
            return Err(Error::invalid("fold_in_sweeps must be >= 1"));
        }
        if !(self.alpha() > 0.0) || !(self.beta > 0.0) {
            return Err(Error::invalid("LDA priors must be positive"));
        }
        Ok(())
    }
}

/// Draws an index with probability proportional to `weights`.
fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Collapsed Gibbs sampler state over a fixed corpus.
pub struct GibbsSampler {
    vocab: Vocabulary,
    config: LdaConfig,
    alpha: f64,
    docs: Vec<Vec<u32>>,
    assignments: Vec<Vec<u32>>,
    doc_topic: Vec<u32>,
    topic_word: Vec<u64>,
    topic_total: Vec<u64>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Builds the vocabulary and assigns every token a random topic.
    pub fn new<D: AsRef<[String]>>(docs: &[D], config: LdaConfig) -> Result<GibbsSampler> {
        config.validate()?;
        if docs.is_empty() {
            return Err(Error::invalid("LDA needs at least one document"));
        }
        let vocab = Vocabulary::build(docs);
        if vocab.is_empty() {
            return Err(Error::invalid("LDA vocabulary is empty"));
        }
        let k = config.num_topics;
        let v = vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let encoded: Vec<Vec<u32>> = docs.iter().map(|d| vocab.encode(d.as_ref())).collect();
        let mut doc_topic = vec![0u32; encoded.len() * k];
        let mut topic_word = vec![0u64; k * v];
        let mut topic_total = vec![0u64; k];
        let mut assignments = Vec::with_capacity(encoded.len());
        for (d, doc) in encoded.iter().enumerate() {
            let z: Vec<u32> = doc
                .iter()
                .map(|&w| {
                    let t = rng.gen_range(0..k);
                    doc_topic[d * k + t] += 1;
                    topic_word[t * v + w as usize] += 1;
                    topic_total[t] += 1;
                    t as u32
                })
                .collect();
            assignments.push(z);
        }
        Ok(GibbsSampler {
            vocab,
            alpha: config.alpha(),
            config,
            docs: encoded,
            assignments,
            doc_topic,
            topic_word,
            topic_total,
            rng,
            weights: vec![0.0; k],
        })
    }

    /// One pass reassigning every token from its full conditional.
    pub fn sweep(&mut self) {
        let k = self.config.num_topics;
        let v = self.vocab.len();
        let beta = self.config.beta;
        let vbeta = v as f64 * beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i] as usize;
                let old = self.assignments[d][i] as usize;
                self.doc_topic[d * k + old] -= 1;
                self.topic_word[old * v + w] -= 1;
                self.topic_total[old] -= 1;
                for t in 0..k {
                    self.weights[t] = (self.doc_topic[d * k + t] as f64 + self.alpha)
                        * (self.topic_word[t * v + w] as f64 + beta)
                        / (self.topic_total[t] as f64 + vbeta);
                }
                let new = sample_index(&mut self.rng, &self.weights);
                self.doc_topic[d * k + new] += 1;
                self.topic_word[new * v + w] += 1;
                self.topic_total[new] += 1;
                self.assignments[d][i] = new as u32;
            }
        }
    }

    /// Tokens currently assigned across all topics.
    pub fn total_assigned(&self) -> u64 {
        self.topic_word.iter().sum()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    pub fn topic_word_counts(&self) -> &[u64] {
        &self.topic_word
    }

    pub fn into_model(self) -> TopicModel {
        TopicModel::from_counts(
            self.vocab,
            self.config.num_topics,
            self.alpha,
            self.config.beta,
            self.topic_word,
            self.config.seed,
            self.config.fold_in_sweeps,
        )
    }
}

/// Runs `iterations` Gibbs sweeps and returns the trained topic model.
pub fn fit_lda<D: AsRef<[String]>>(docs: &[D], config: LdaConfig) -> Result<TopicModel> {
    let mut sampler = GibbsSampler::new(docs, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

/// Trained LDA: topic-word counts plus what fold-in inference needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub(crate) vocab: Vocabulary,
    pub(crate) num_topics: usize,
    pub(crate) alpha: f64,
    pub(crate) beta: f64,
    pub(crate) topic_word_counts: Vec<u64>,
    pub(crate) seed: u64,
    pub(crate) fold_in_sweeps: usize,
    pub(crate) trained: bool,
    phi: Vec<f64>,
}

impl TopicModel {
    /// Model with every count zero; `embed` refuses to run on it.
    pub fn untrained(vocab: Vocabulary, num_topics: usize, alpha: f64, beta: f64, seed: u64) -> TopicModel {
        let counts = vec![0; num_topics * vocab.len()];
        let mut m = TopicModel::from_counts(vocab, num_topics, alpha, beta, counts, seed, 50);
        m.trained = false;
        m
    }

    /// Trained model from explicit `num_topics × |V|` topic-word counts.
    pub fn from_counts(
        vocab: Vocabulary,
        num_topics: usize,
        alpha: f64,
        beta: f64,
        topic_word_counts: Vec<u64>,
        seed: u64,
        fold_in_sweeps: usize,
    ) -> TopicModel {
        assert_eq!(topic_word_counts.len(), num_topics * vocab.len());
        let v = vocab.len();
        let mut phi = vec![0.0; topic_word_counts.len()];
        for t in 0..num_topics {
            let row = &topic_word_counts[t * v..(t + 1) * v];
            let total: u64 = row.iter().sum();
            let denom = total as f64 + v as f64 * beta;
            for (w, &c) in row.iter().enumerate() {
                phi[t * v + w] = (c as f64 + beta) / denom;
            }
        }
        TopicModel {
            vocab,
            num_topics,
            alpha,
            beta,
            topic_word_counts,
            seed,
            fold_in_sweeps: fold_in_sweeps.max(1),
            trained: true,
            phi,
        }
    }

    pub fn num_topics(&self) -> usize {
        self.num_topics
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn topic_word_counts(&self) -> &[u64] {
        &self.topic_word_counts
    }

    /// Smoothed word distribution of `topic`; sums to one.
    pub fn topic_distribution(&self, topic: usize) -> &[f64] {
        let v = self.vocab.len();
        &self.phi[topic * v..(topic + 1) * v]
    }

    pub fn set_fold_in_sweeps(&mut self, sweeps: usize) {
        self.fold_in_sweeps = sweeps.max(1);
    }

    /// Topic proportions of a new document under the fixed topic-word
    /// distributions, averaged over the second half of the sweeps.
    pub fn infer(&self, tokens: &[String], doc_seed: u64) -> Result<DocVector> {
        if !self.trained {
            return Err(Error::Untrained);
        }
        let k = self.num_topics;
        let v = self.vocab.len();
        let ids = self.vocab.encode(tokens);
        if ids.is_empty() {
            return Ok(DocVector::uniform(k));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ doc_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut counts = vec![0u32; k];
        let mut z: Vec<usize> = ids
            .iter()
            .map(|_| {
                let t = rng.gen_range(0..k);
                counts[t] += 1;
                t
            })
            .collect();
        let mut weights = vec![0.0; k];
        let mut theta = vec![0.0; k];
        let burn_in = self.fold_in_sweeps / 2;
        let denom = ids.len() as f64 + k as f64 * self.alpha;
        for sweep in 0..self.fold_in_sweeps {
            for (i, &w) in ids.iter().enumerate() {
                counts[z[i]] -= 1;
                for t in 0..k {
                    weights[t] = (counts[t] as f64 + self.alpha) * self.phi[t * v + w as usize];
                }
                z[i] = sample_index(&mut rng, &weights);
                counts[z[i]] += 1;
            }
            if sweep >= burn_in {
                for t in 0..k {
                    theta[t] += (counts[t] as f64 + self.alpha) / denom;
                }
            }
        }
        Ok(DocVector::normalized(theta))
    }
}

impl DocumentEmbedder for TopicModel {
    fn dimension(&self) -> usize {
        self.num_topics
    }

    fn embed(&self, tokens: &[String], doc_seed: u64) -> Result<DocVector> {
        self.infer(tokens, doc_seed)
    }
}
