use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SkillArea;
use crate::corpus::{Corpus, PostId};
use crate::error::{Error, Result};

/// The `limit` most frequent question tags; ties go to the lexicographically
/// smaller tag.
pub fn top_tags(corpus: &Corpus, limit: usize) -> Vec<String> {
    let mut tags: Vec<(&String, usize)> = corpus.tag_counts().iter().map(|(t, &c)| (t, c)).collect();
    tags.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    tags.into_iter().take(limit).map(|(t, _)| t.clone()).collect()
}

/// Jaccard overlap of the question sets carrying `t1` and `t2`.
pub fn tag_similarity(corpus: &Corpus, t1: &str, t2: &str) -> Result<f64> {
    let a = corpus.questions_with_tag(t1);
    let b = corpus.questions_with_tag(t2);
    if a.is_empty() {
        return Err(Error::UnknownTag(t1.into()));
    }
    if b.is_empty() {
        return Err(Error::UnknownTag(t2.into()));
    }
    Ok(jaccard(a, b))
}

fn jaccard(a: &[PostId], b: &[PostId]) -> f64 {
    // both lists are sorted by id
    let (mut i, mut j, mut both) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                both += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let either = a.len() + b.len() - both;
    both as f64 / either as f64
}

pub fn similarity_matrix(corpus: &Corpus, tags: &[String]) -> Result<Vec<Vec<f64>>> {
    let n = tags.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0;
        for j in (i + 1)..n {
            let s = tag_similarity(corpus, &tags[i], &tags[j])?;
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    Ok(m)
}

/// Average-linkage agglomerative clustering.
///
/// Merges the pair with the highest mean pairwise similarity while that mean
/// is at least `stop_threshold`. Equal means go to the pair whose labels
/// (smallest member tag) are lexicographically smallest. Clusters come back
/// sorted internally and ordered by label.
pub fn cluster_tags(tags: &[String], similarity: &[Vec<f64>], stop_threshold: f64) -> Result<Vec<Vec<String>>> {
    if !(0.0..=1.0).contains(&stop_threshold) {
        return Err(Error::invalid(format!(
            "cluster threshold {stop_threshold} outside [0, 1]"
        )));
    }
    let n = tags.len();
    if similarity.len() != n || similarity.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("similarity matrix must be {n}x{n}")));
    }
    for i in 0..n {
        if (similarity[i][i] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("similarity matrix needs a unit diagonal"));
        }
        for j in 0..i {
            if similarity[i][j] != similarity[j][i] {
                return Err(Error::invalid("similarity matrix is not symmetric"));
            }
        }
    }

    // Active clusters: members (sorted) and pairwise similarity sums.
    let mut members: Vec<Option<Vec<String>>> = tags.iter().map(|t| Some(vec![t.clone()])).collect();
    let mut sums: Vec<Vec<f64>> = similarity.to_vec();

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..n {
            let Some(ma) = &members[a] else { continue };
            for b in (a + 1)..n {
                let Some(mb) = &members[b] else { continue };
                let avg = sums[a][b] / (ma.len() * mb.len()) as f64;
                let better = match best {
                    None => true,
                    Some((s, ba, bb)) => {
                        avg > s
                            || (avg == s
                                && pair_label(ma, mb)
                                    < pair_label(members[ba].as_ref().unwrap(), members[bb].as_ref().unwrap()))
                    }
                };
                if better {
                    best = Some((avg, a, b));
                }
            }
        }
        let Some((avg, a, b)) = best else { break };
        if avg < stop_threshold {
            break;
        }
        let mut merged = members[a].take().unwrap();
        merged.extend(members[b].take().unwrap());
        merged.sort();
        members[a] = Some(merged);
        for c in 0..n {
            if c != a && c != b && members[c].is_some() {
                let s = sums[a][c] + sums[b][c];
                sums[a][c] = s;
                sums[c][a] = s;
            }
        }
    }

    let mut out: Vec<Vec<String>> = members.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

fn pair_label<'a>(a: &'a [String], b: &'a [String]) -> (&'a str, &'a str) {
    let (x, y) = (a[0].as_str(), b[0].as_str());
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverrideAction {
    /// Skill area with exactly these tags, split out of wherever they were.
    Keep,
    /// Union of every cluster touching these tags.
    Merge,
    /// Remove the tags from all clusters.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkillOverride {
    #[serde(default)]
    pub name: String,
    pub tags: Vec<String>,
    pub action: OverrideAction,
}

pub fn read_overrides(path: &Path) -> Result<Vec<SkillOverride>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(serde_json::from_str(&text)?)
}

/// Applies curation overrides (in file order) to automatic clusters and
/// names the survivors. Untouched clusters are named after their most
/// frequent tag.
pub fn apply_skill_overrides(
    corpus: &Corpus,
    clusters: &[Vec<String>],
    overrides: &[SkillOverride],
) -> Result<Vec<SkillArea>> {
    let known: BTreeSet<&String> = clusters.iter().flatten().collect();
    let mut groups: Vec<(Option<String>, BTreeSet<String>)> =
        clusters.iter().map(|c| (None, c.iter().cloned().collect())).collect();

    for ov in overrides {
        if let Some(t) = ov.tags.iter().find(|t| !known.contains(t)) {
            return Err(Error::UnknownTag(t.clone()));
        }
        let listed: BTreeSet<String> = ov.tags.iter().cloned().collect();
        if ov.action != OverrideAction::Drop {
            if ov.name.trim().is_empty() {
                return Err(Error::invalid("keep/merge overrides need a name"));
            }
            if let Some((name, _)) = groups.iter().find(|(n, g)| n.is_some() && !g.is_disjoint(&listed)) {
                return Err(Error::invalid(format!(
                    "override `{}` reuses tags already assigned to `{}`",
                    ov.name,
                    name.as_deref().unwrap_or_default()
                )));
            }
        }
        match ov.action {
            OverrideAction::Drop | OverrideAction::Keep => {
                for (_, g) in groups.iter_mut() {
                    g.retain(|t| !listed.contains(t));
                }
                groups.retain(|(_, g)| !g.is_empty());
                if ov.action == OverrideAction::Keep && !listed.is_empty() {
                    groups.push((Some(ov.name.clone()), listed));
                }
            }
            OverrideAction::Merge => {
                let mut union = listed.clone();
                groups.retain(|(_, g)| {
                    if g.is_disjoint(&listed) {
                        true
                    } else {
                        union.extend(g.iter().cloned());
                        false
                    }
                });
                groups.push((Some(ov.name.clone()), union));
            }
        }
    }

    let counts = corpus.tag_counts();
    let mut named: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (name, tags) in groups {
        let name = name.unwrap_or_else(|| {
            tags.iter()
                .max_by(|a, b| {
                    let (ca, cb) = (counts.get(*a).unwrap_or(&0), counts.get(*b).unwrap_or(&0));
                    ca.cmp(cb).then_with(|| b.cmp(a))
                })
                .cloned()
                .unwrap_or_default()
        });
        if named.contains_key(&name) {
            return Err(Error::invalid(format!("two skill areas named `{name}`")));
        }
        named.insert(name, tags);
    }

    named
        .into_iter()
        .map(|(name, tags)| SkillArea::new(corpus, name, tags))
        .collect()
}
