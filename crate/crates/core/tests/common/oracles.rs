//! Reference implementations written straight from the formulas. None of
//! them calls into the library.

use std::collections::{BTreeMap, BTreeSet};

use tshape_core::corpus::{Post, PostId, UserId};

// ---- ranking metrics ----

pub fn dcg(grades: &[u8], r: usize) -> f64 {
    let mut total = 0.0;
    for (i, &g) in grades.iter().enumerate().take(r) {
        let rank = (i + 1) as f64;
        total += (2f64.powi(g as i32) - 1.0) / (rank + 1.0).log2();
    }
    total
}

/// Ideal DCG built from grade counts.
pub fn idcg(grades: &[u8], r: usize) -> f64 {
    let mut counts = [0usize; 3];
    for &g in grades {
        counts[g as usize] += 1;
    }
    let mut ideal = Vec::with_capacity(grades.len());
    for g in [2u8, 1, 0] {
        ideal.extend(std::iter::repeat_n(g, counts[g as usize]));
    }
    dcg(&ideal, r)
}

/// Ideal DCG as the best DCG over every permutation.
pub fn idcg_exhaustive(grades: &[u8], r: usize) -> f64 {
    fn go(items: &mut Vec<u8>, k: usize, r: usize, best: &mut f64) {
        if k == items.len() {
            *best = best.max(dcg(items, r));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(items, k + 1, r, best);
            items.swap(k, i);
        }
    }
    let mut best = 0.0;
    go(&mut grades.to_vec(), 0, r, &mut best);
    best
}

pub fn ndcg(grades: &[u8], r: usize) -> f64 {
    let ideal = idcg(grades, r);
    if ideal == 0.0 {
        0.0
    } else {
        dcg(grades, r) / ideal
    }
}

/// Cascade model with `g_max = 2`, product recomputed at every rank.
pub fn err(grades: &[u8], r: usize) -> f64 {
    let stop = |g: u8| (2f64.powi(g as i32) - 1.0) / 4.0;
    let mut total = 0.0;
    for k in 0..grades.len().min(r) {
        let mut reach = 1.0;
        for &g in &grades[..k] {
            reach *= 1.0 - stop(g);
        }
        total += reach * stop(grades[k]) / (k + 1) as f64;
    }
    total
}

pub fn reciprocal_rank(grades: &[u8], r: usize, min_grade: u8) -> f64 {
    for (k, &g) in grades.iter().enumerate().take(r) {
        if g >= min_grade {
            return 1.0 / (k + 1) as f64;
        }
    }
    0.0
}

pub fn mrr(queries: &[Vec<u8>], r: usize, min_grade: u8) -> f64 {
    queries.iter().map(|g| reciprocal_rank(g, r, min_grade)).sum::<f64>() / queries.len() as f64
}

// ---- paired t-test ----

/// `(t, df)` with the sample standard deviation of the differences.
pub fn paired_t(a: &[f64], b: &[f64]) -> (f64, usize) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean / (var.sqrt() / n.sqrt()), d.len() - 1)
}

// ---- document-based baseline ----

/// `Σ_d P(q|d) / |D^c|` over raw token lists, with Jelinek-Mercer smoothing.
pub fn dba_score(docs: &BTreeMap<PostId, Vec<String>>, mine: &[PostId], terms: &[String], lambda: f64) -> f64 {
    if mine.is_empty() {
        return 0.0;
    }
    let collection: usize = docs.values().map(Vec::len).sum();
    let cf = |t: &str| docs.values().flatten().filter(|w| *w == t).count() as f64;
    let mut total = 0.0;
    for id in mine {
        let d = &docs[id];
        let mut p = 1.0;
        for t in terms {
            let tf = d.iter().filter(|w| *w == t).count() as f64;
            let ml = if d.is_empty() { 0.0 } else { tf / d.len() as f64 };
            p *= (1.0 - lambda) * ml + lambda * cf(t) / collection as f64;
        }
        total += p;
    }
    total / mine.len() as f64
}

// ---- labeling ----

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScore {
    pub user: UserId,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// 0 advanced, 1 intermediate, 2 beginner.
    pub level: u8,
}

/// Scores for one skill given by its tag set, recounted from raw posts.
pub fn score_skill(posts: &[Post], tags: &BTreeSet<String>) -> Vec<OracleScore> {
    let in_skill: BTreeSet<PostId> = posts
        .iter()
        .filter(|p| !p.is_answer() && p.tags.iter().any(|t| tags.contains(t)))
        .map(|p| p.post_id)
        .collect();
    let answers: Vec<&Post> = posts
        .iter()
        .filter(|p| p.is_answer() && p.parent_id.is_some_and(|q| in_skill.contains(&q)))
        .collect();
    let total_accepted = answers.iter().filter(|a| a.accepted).count();
    let users: BTreeSet<UserId> = answers.iter().filter_map(|a| a.owner).collect();
    let mut scores: Vec<OracleScore> = users
        .into_iter()
        .map(|u| {
            let n = answers.iter().filter(|a| a.owner == Some(u)).count();
            let acc = answers.iter().filter(|a| a.owner == Some(u) && a.accepted).count();
            let precision = acc as f64 / n as f64;
            let recall = if total_accepted == 0 {
                0.0
            } else {
                acc as f64 / total_accepted as f64
            };
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            OracleScore {
                user: u,
                precision,
                recall,
                f1,
                level: 2,
            }
        })
        .collect();
    // Selection sort on (f1 desc, user asc), then the ceiling rule.
    for i in 0..scores.len() {
        let mut best = i;
        for j in i + 1..scores.len() {
            let (a, b) = (&scores[j], &scores[best]);
            if a.f1 > b.f1 || (a.f1 == b.f1 && a.user < b.user) {
                best = j;
            }
        }
        scores.swap(i, best);
    }
    let n = scores.len();
    let advanced = (n * 5).div_ceil(100);
    let intermediate = (n * 20).div_ceil(100);
    for (rank, s) in scores.iter_mut().enumerate() {
        s.level = if rank < advanced {
            0
        } else if rank < advanced + intermediate {
            1
        } else {
            2
        };
    }
    scores
}

/// `"t_shaped"`, `"c_shaped"` or `"non_expert"` from per-skill levels.
pub fn shape(levels: &[u8]) -> &'static str {
    let adv = levels.iter().filter(|&&l| l == 0).count();
    let inter = levels.iter().filter(|&&l| l == 1).count();
    if adv >= 2 {
        "c_shaped"
    } else if adv == 1 && inter >= 1 {
        "t_shaped"
    } else {
        "non_expert"
    }
}

/// Shape of every post owner.
pub fn shapes(posts: &[Post], skills: &[BTreeSet<String>]) -> BTreeMap<UserId, &'static str> {
    let per_skill: Vec<Vec<OracleScore>> = skills.iter().map(|t| score_skill(posts, t)).collect();
    let owners: BTreeSet<UserId> = posts.iter().filter_map(|p| p.owner).collect();
    owners
        .into_iter()
        .map(|u| {
            let levels: Vec<u8> = per_skill
                .iter()
                .map(|block| block.iter().find(|s| s.user == u).map_or(2, |s| s.level))
                .collect();
            (u, shape(&levels))
        })
        .collect()
}
