use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f1_score, ExpertiseShape, KnowledgeLevel, Relation, SkillArea, UserSkillScore};
use crate::corpus::{Corpus, UserId};

/// Share of the ranked users labelled advanced, then intermediate.
pub const ADVANCED_SHARE: f64 = 0.05;
pub const INTERMEDIATE_SHARE: f64 = 0.20;

/// Accepted answers by `user` in the skill over all their answers in it.
pub fn precision(corpus: &Corpus, skill: &SkillArea, user: UserId) -> f64 {
    let (mine, accepted) = skill
        .documents
        .iter()
        .filter_map(|id| corpus.post(*id))
        .filter(|p| p.owner == Some(user))
        .fold((0usize, 0usize), |(n, a), p| (n + 1, a + p.accepted as usize));
    if mine == 0 {
        0.0
    } else {
        accepted as f64 / mine as f64
    }
}

/// Accepted answers by `user` in the skill over every accepted answer in it.
pub fn recall(corpus: &Corpus, skill: &SkillArea, user: UserId) -> f64 {
    let (total, mine) = skill
        .documents
        .iter()
        .filter_map(|id| corpus.post(*id))
        .filter(|p| p.accepted)
        .fold((0usize, 0usize), |(t, m), p| {
            (t + 1, m + (p.owner == Some(user)) as usize)
        });
    if total == 0 {
        0.0
    } else {
        mine as f64 / total as f64
    }
}

/// Ranks by descending f1 (ties: ascending user id) and labels the first
/// `ceil(5%)` advanced, the next `ceil(20%)` intermediate, the rest beginner.
/// Returns the scores in rank order.
pub fn assign_levels(mut scores: Vec<UserSkillScore>) -> Vec<UserSkillScore> {
    scores.sort_by(|a, b| b.f1.total_cmp(&a.f1).then(a.user.cmp(&b.user)));
    let n = scores.len() as f64;
    let advanced = (ADVANCED_SHARE * n).ceil() as usize;
    let intermediate = (INTERMEDIATE_SHARE * n).ceil() as usize;
    for (rank, s) in scores.iter_mut().enumerate() {
        s.level = if rank < advanced {
            KnowledgeLevel::Advanced
        } else if rank < advanced + intermediate {
            KnowledgeLevel::Intermediate
        } else {
            KnowledgeLevel::Beginner
        };
    }
    scores
}

/// Precision, recall, f1 and level for every user with at least one answer in
/// the skill area. Users without answers there are implicitly beginners.
pub fn score_skill(corpus: &Corpus, skill: &SkillArea) -> Vec<UserSkillScore> {
    let mut per_user: BTreeMap<UserId, (usize, usize)> = BTreeMap::new();
    let mut total_accepted = 0usize;
    for post in skill.documents.iter().filter_map(|id| corpus.post(*id)) {
        total_accepted += post.accepted as usize;
        if let Some(owner) = post.owner {
            let e = per_user.entry(owner).or_default();
            e.0 += 1;
            e.1 += post.accepted as usize;
        }
    }
    let scores = per_user
        .into_iter()
        .map(|(user, (answers, accepted))| {
            let precision = accepted as f64 / answers as f64;
            let recall = if total_accepted == 0 {
                0.0
            } else {
                accepted as f64 / total_accepted as f64
            };
            UserSkillScore {
                user,
                skill: skill.name.clone(),
                precision,
                recall,
                f1: f1_score(precision, recall),
                level: KnowledgeLevel::Beginner,
            }
        })
        .collect();
    assign_levels(scores)
}

/// Shape from a user's level in every skill area.
///
/// Advanced in exactly one skill with no intermediate elsewhere falls through
/// to non-expert.
pub fn classify_shape(levels: &[KnowledgeLevel]) -> ExpertiseShape {
    let advanced = levels.iter().filter(|&&l| l == KnowledgeLevel::Advanced).count();
    let intermediate = levels.iter().filter(|&&l| l == KnowledgeLevel::Intermediate).count();
    match (advanced, intermediate) {
        (0, _) => ExpertiseShape::NonExpert,
        (1, i) if i >= 1 => ExpertiseShape::TShaped,
        (1, _) => ExpertiseShape::NonExpert,
        _ => ExpertiseShape::CShaped,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserShape {
    pub shape: ExpertiseShape,
    pub advanced: Vec<String>,
    pub intermediate: Vec<String>,
}

/// Per-skill scores plus the shape of every candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    /// Skill areas in input order, each block in rank order.
    pub scores: Vec<UserSkillScore>,
    pub shapes: BTreeMap<UserId, UserShape>,
    /// Users advanced in one skill with no intermediate skill.
    pub fallthrough: Vec<UserId>,
}

impl Labels {
    pub fn relation(&self, user: UserId, skill: &str) -> Relation {
        match self.shapes.get(&user) {
            Some(s) if s.shape == ExpertiseShape::TShaped && s.advanced.iter().any(|a| a == skill) => Relation::TExpert,
            Some(s) if s.shape == ExpertiseShape::CShaped && s.advanced.iter().any(|a| a == skill) => Relation::CExpert,
            _ => Relation::Other,
        }
    }

    pub fn shape(&self, user: UserId) -> ExpertiseShape {
        self.shapes
            .get(&user)
            .map(|s| s.shape)
            .unwrap_or(ExpertiseShape::NonExpert)
    }

    /// `user,skill,precision,recall,f1,level`
    pub fn scores_csv(&self) -> String {
        let mut out = String::from("user,skill,precision,recall,f1,level\n");
        for s in &self.scores {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.user,
                csv_field(&s.skill),
                s.precision,
                s.recall,
                s.f1,
                s.level.as_str()
            )
            .unwrap();
        }
        out
    }

    /// `user,shape`
    pub fn shapes_csv(&self) -> String {
        let mut out = String::from("user,shape\n");
        for (user, s) in &self.shapes {
            writeln!(out, "{},{}", user, s.shape).unwrap();
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scores every skill area (in parallel) and classifies every user of the
/// corpus.
pub fn label_users(corpus: &Corpus, skills: &[SkillArea]) -> Labels {
    let per_skill: Vec<Vec<UserSkillScore>> = skills.par_iter().map(|s| score_skill(corpus, s)).collect();

    let mut levels: BTreeMap<UserId, Vec<KnowledgeLevel>> = corpus
        .users()
        .iter()
        .map(|&u| (u, vec![KnowledgeLevel::Beginner; skills.len()]))
        .collect();
    for (i, block) in per_skill.iter().enumerate() {
        for s in block {
            levels
                .entry(s.user)
                .or_insert_with(|| vec![KnowledgeLevel::Beginner; skills.len()])[i] = s.level;
        }
    }

    let mut shapes = BTreeMap::new();
    let mut fallthrough = Vec::new();
    for (user, lv) in levels {
        let shape = classify_shape(&lv);
        let pick = |level| {
            lv.iter()
                .zip(skills)
                .filter(|(l, _)| **l == level)
                .map(|(_, s)| s.name.clone())
                .collect::<Vec<_>>()
        };
        let advanced = pick(KnowledgeLevel::Advanced);
        let intermediate = pick(KnowledgeLevel::Intermediate);
        if advanced.len() == 1 && intermediate.is_empty() {
            fallthrough.push(user);
        }
        shapes.insert(
            user,
            UserShape {
                shape,
                advanced,
                intermediate,
            },
        );
    }

    Labels {
        scores: per_skill.into_iter().flatten().collect(),
        shapes,
        fallthrough,
    }
}
