//! Ranking candidates per query, graded metrics, significance tests, the
//! document-language-model baseline and report files.

mod dba;
pub mod metrics;
mod report;
pub mod stats;

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

pub use dba::{rank_by_dba, DbaIndex};
pub use metrics::{err_at, mrr_at, ndcg_at, reciprocal_rank_at};
pub use report::{
    compare_systems, emit_report, line_chart_svg, metrics_csv, ttests_csv, Metric, MetricTable, Series, TTestRow,
};
pub use stats::{paired_t_test, TTestResult};

use crate::corpus::{Corpus, PostId, UserId};
use crate::embedding::DocVector;
use crate::error::{Error, Result};
use crate::labels::SkillArea;
use crate::nn::{candidate_matrix, query_matrix, DualCnn};
use crate::scalar::Real;

/// Candidates for one query, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub query: String,
    /// Sorted by descending score, ties by ascending user id.
    pub entries: Vec<(UserId, f64)>,
    /// Graded relevance; users absent from the map have grade 0.
    pub relevance: BTreeMap<UserId, u8>,
}

impl Ranking {
    pub fn new(
        query: impl Into<String>,
        mut scores: Vec<(UserId, f64)>,
        relevance: BTreeMap<UserId, u8>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(scores.len());
        if let Some((u, _)) = scores.iter().find(|(u, _)| !seen.insert(*u)) {
            return Err(Error::invalid(format!("user {u} appears twice in a ranking")));
        }
        if let Some((u, _)) = scores.iter().find(|(_, s)| s.is_nan()) {
            return Err(Error::invalid(format!("user {u} has a NaN score")));
        }
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(Ranking {
            query: query.into(),
            entries: scores,
            relevance,
        })
    }

    pub fn grade(&self, user: UserId) -> u8 {
        self.relevance.get(&user).copied().unwrap_or(0)
    }

    /// Grades in rank order.
    pub fn grades(&self) -> Vec<u8> {
        self.entries.iter().map(|(u, _)| self.grade(*u)).collect()
    }

    /// Grades the ideal ordering may draw on: every ranked entry plus
    /// relevant users the ranking left out.
    pub fn ideal_pool(&self) -> Vec<u8> {
        let ranked: HashSet<UserId> = self.entries.iter().map(|(u, _)| *u).collect();
        let mut pool = self.grades();
        pool.extend(
            self.relevance
                .iter()
                .filter(|(u, &g)| g > 0 && !ranked.contains(u))
                .map(|(_, &g)| g),
        );
        pool
    }

    pub fn ndcg<T: Real>(&self, r: usize) -> Result<T> {
        metrics::ndcg_with_ideal(&self.grades(), &self.ideal_pool(), r)
    }

    pub fn err<T: Real>(&self, r: usize) -> Result<T> {
        err_at(&self.grades(), r)
    }

    pub fn reciprocal_rank<T: Real>(&self, r: usize, min_grade: u8) -> Result<T> {
        reciprocal_rank_at(&self.grades(), r, min_grade)
    }
}

/// `query,rank,user,score,grade`
pub fn rankings_csv(rankings: &[Ranking]) -> String {
    let mut out = String::from("query,rank,user,score,grade\n");
    for r in rankings {
        for (i, (u, s)) in r.entries.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                crate::labels::csv_field(&r.query),
                i + 1,
                u,
                s,
                r.grade(*u)
            );
        }
    }
    out
}

type ParsedQuery = (String, Vec<(UserId, f64)>, BTreeMap<UserId, u8>);

/// Inverse of [`rankings_csv`]. Relevance is rebuilt from the grade column,
/// so users missing from a ranking are treated as grade 0.
pub fn parse_rankings_csv(text: &str) -> Result<Vec<Ranking>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "query,rank,user,score,grade")) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header query,rank,user,score,grade".into(),
            })
        }
    }
    let mut out: Vec<ParsedQuery> = Vec::new();
    for (i, line) in lines {
        let bad = |m: &str| Error::Parse {
            line: i + 1,
            message: m.to_string(),
        };
        let mut f = line.rsplitn(5, ',');
        let grade: u8 = f.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad grade"))?;
        let score: f64 = f.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad score"))?;
        let user: i64 = f.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad user"))?;
        let _rank = f.next().ok_or_else(|| bad("missing rank"))?;
        let raw = f.next().ok_or_else(|| bad("missing query"))?;
        let query = match raw.strip_prefix('"').and_then(|q| q.strip_suffix('"')) {
            Some(q) => q.replace("\"\"", "\""),
            None => raw.to_string(),
        };
        if out.last().map(|r| &r.0) != Some(&query) {
            out.push((query, Vec::new(), BTreeMap::new()));
        }
        let cur = out.last_mut().expect("just pushed");
        cur.1.push((UserId(user), score));
        if grade > 0 {
            cur.2.insert(UserId(user), grade);
        }
    }
    out.into_iter().map(|(q, e, r)| Ranking::new(q, e, r)).collect()
}

/// Graded relevance of each candidate for one skill.
pub fn relevance_for(
    labels: &crate::labels::Labels,
    mode: crate::labels::RankingMode,
    skill: &str,
    candidates: &[UserId],
) -> BTreeMap<UserId, u8> {
    candidates
        .iter()
        .map(|&u| (u, mode.grade(labels.relation(u, skill))))
        .filter(|&(_, g)| g > 0)
        .collect()
}

/// Scores every candidate with `o3` of the trained model.
pub fn rank_by_model<T: Real>(
    model: &DualCnn<T>,
    skill: &SkillArea,
    candidates: &[UserId],
    corpus: &Corpus,
    vectors: &BTreeMap<PostId, DocVector>,
    relevance: BTreeMap<UserId, u8>,
) -> Result<Ranking> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidate set is empty"));
    }
    let c = model.config();
    let eq = query_matrix::<T>(skill, vectors, c.n, c.m_d)?;
    let scores = candidates
        .par_iter()
        .map(|&u| {
            let ec = candidate_matrix::<T>(corpus, u, vectors, c.n, c.m_d)?;
            Ok((u, model.score(&ec, &eq)?.to_f64_lossy()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ranking::new(skill.name.clone(), scores, relevance)
}

/// A uniformly random order; scores count down from `|candidates|`.
pub fn random_ranking<R: Rng>(
    query: &str,
    candidates: &[UserId],
    relevance: BTreeMap<UserId, u8>,
    rng: &mut R,
) -> Result<Ranking> {
    let mut order = candidates.to_vec();
    order.shuffle(rng);
    let n = order.len();
    let scores = order
        .into_iter()
        .enumerate()
        .map(|(i, u)| (u, (n - i) as f64))
        .collect();
    Ranking::new(query, scores, relevance)
}
