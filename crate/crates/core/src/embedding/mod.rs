//! Document embeddings: answers become topic-proportion vectors.

mod lda;
pub(crate) mod persist;
mod stopwords;
mod tokenize;
mod vocab;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

pub use lda::{fit_lda, GibbsSampler, LdaConfig, TopicModel};
pub use persist::{load_topic_model, save_topic_model, LDA_MAGIC};
pub use tokenize::tokenize;
pub use vocab::Vocabulary;

use crate::corpus::{Corpus, PostId};
use crate::error::Result;

/// Non-negative vector summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DocVector(Vec<f64>);

impl DocVector {
    pub fn uniform(dim: usize) -> DocVector {
        DocVector(vec![1.0 / dim as f64; dim])
    }

    /// Scales non-negative `values` to sum to one; all-zero input becomes
    /// uniform.
    pub fn normalized(mut values: Vec<f64>) -> DocVector {
        let total: f64 = values.iter().sum();
        if total > 0.0 {
            values.iter_mut().for_each(|x| *x /= total);
            DocVector(values)
        } else {
            DocVector::uniform(values.len())
        }
    }

    /// Wraps values that are already a distribution (e.g. read back from disk).
    pub fn from_raw(values: Vec<f64>) -> DocVector {
        DocVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn cosine(&self, other: &DocVector) -> f64 {
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        let na: f64 = self.0.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = other.0.iter().map(|b| b * b).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            dot / (na * nb)
        }
    }
}

/// Maps a tokenized document to a fixed-size vector. `doc_seed` makes
/// stochastic embedders reproducible per document.
pub trait DocumentEmbedder: Sync {
    fn dimension(&self) -> usize;

    fn embed(&self, tokens: &[String], doc_seed: u64) -> Result<DocVector>;
}

/// Tokens of every answer, keyed by post id.
pub fn tokenize_answers(corpus: &Corpus) -> BTreeMap<PostId, Vec<String>> {
    let answers: Vec<_> = corpus.answers().collect();
    answers
        .par_iter()
        .map(|p| (p.post_id, tokenize(&p.body)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Embeds every document in parallel, seeding each by its post id.
pub fn embed_documents<E: DocumentEmbedder + ?Sized>(
    embedder: &E,
    docs: &BTreeMap<PostId, Vec<String>>,
) -> Result<BTreeMap<PostId, DocVector>> {
    let items: Vec<(&PostId, &Vec<String>)> = docs.iter().collect();
    let out: Result<Vec<(PostId, DocVector)>> = items
        .par_iter()
        .map(|(id, toks)| Ok((**id, embedder.embed(toks, id.0 as u64)?)))
        .collect();
    Ok(out?.into_iter().collect())
}

/// `doc_id,v1,…,v{m_d}`
pub fn embeddings_csv(vectors: &BTreeMap<PostId, DocVector>, dim: usize) -> String {
    let mut out = String::from("doc_id");
    for i in 1..=dim {
        write!(out, ",v{i}").unwrap();
    }
    out.push('\n');
    for (id, v) in vectors {
        write!(out, "{id}").unwrap();
        for x in v.values() {
            write!(out, ",{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`embeddings_csv`].
pub fn parse_embeddings_csv(text: &str) -> Result<BTreeMap<PostId, DocVector>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| crate::Error::Parse {
            line: i + 1,
            message: m.to_string(),
        };
        let mut fields = line.split(',');
        let id: i64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("bad doc_id"))?;
        let values: std::result::Result<Vec<f64>, _> = fields.map(str::parse).collect();
        out.insert(PostId(id), DocVector(values.map_err(|_| bad("bad vector entry"))?));
    }
    Ok(out)
}
