use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::Ranking;
use crate::corpus::{Corpus, PostId, UserId};
use crate::embedding::tokenize;
use crate::error::{Error, Result};
use crate::labels::SkillArea;

/// Term statistics for the document-based language-model baseline.
#[derive(Debug, Clone, Default)]
pub struct DbaIndex {
    doc_terms: HashMap<PostId, HashMap<String, u32>>,
    doc_len: HashMap<PostId, u32>,
    collection: HashMap<String, u64>,
    collection_len: u64,
}

impl DbaIndex {
    pub fn new(tokens: &BTreeMap<PostId, Vec<String>>) -> Self {
        let mut idx = DbaIndex::default();
        for (&id, toks) in tokens {
            let mut tf: HashMap<String, u32> = HashMap::new();
            for t in toks {
                *tf.entry(t.clone()).or_default() += 1;
                *idx.collection.entry(t.clone()).or_default() += 1;
            }
            idx.doc_len.insert(id, toks.len() as u32);
            idx.collection_len += toks.len() as u64;
            idx.doc_terms.insert(id, tf);
        }
        idx
    }

    pub fn collection_frequency(&self, term: &str) -> u64 {
        self.collection.get(term).copied().unwrap_or(0)
    }

    /// Query terms: the skill's tags run through the tokenizer, deduplicated,
    /// keeping only terms that occur somewhere in the collection.
    pub fn query_terms(&self, skill: &SkillArea) -> Vec<String> {
        let terms: BTreeSet<String> = skill.tags.iter().flat_map(|t| tokenize(t)).collect();
        terms.into_iter().filter(|t| self.collection_frequency(t) > 0).collect()
    }

    /// `P(q | d)` with Jelinek-Mercer smoothing.
    pub fn query_likelihood(&self, doc: PostId, terms: &[String], lambda: f64) -> f64 {
        let len = self.doc_len.get(&doc).copied().unwrap_or(0);
        let tf = self.doc_terms.get(&doc);
        terms
            .iter()
            .map(|t| {
                let ml = match (tf, len) {
                    (Some(tf), l) if l > 0 => f64::from(tf.get(t).copied().unwrap_or(0)) / f64::from(l),
                    _ => 0.0,
                };
                let bg = self.collection_frequency(t) as f64 / self.collection_len.max(1) as f64;
                (1.0 - lambda) * ml + lambda * bg
            })
            .product()
    }

    /// `Σ_d P(q|d) P(d|c)` with uniform `P(d|c) = 1/|D^c|`.
    pub fn score(&self, corpus: &Corpus, user: UserId, terms: &[String], lambda: f64) -> f64 {
        let docs = corpus.documents_of_user(user);
        if docs.is_empty() {
            return 0.0;
        }
        let total: f64 = docs
            .iter()
            .map(|d| self.query_likelihood(d.post_id, terms, lambda))
            .sum();
        total / docs.len() as f64
    }
}

pub fn rank_by_dba(
    index: &DbaIndex,
    skill: &SkillArea,
    candidates: &[UserId],
    corpus: &Corpus,
    lambda: f64,
    relevance: BTreeMap<UserId, u8>,
) -> Result<Ranking> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if candidates.is_empty() {
        return Err(Error::invalid("candidate set is empty"));
    }
    let terms = index.query_terms(skill);
    let scores = candidates
        .iter()
        .map(|&u| (u, index.score(corpus, u, &terms, lambda)))
        .collect();
    Ranking::new(skill.name.clone(), scores, relevance)
}
