//! Skill-area extraction, per-skill knowledge levels, expertise shapes and
//! the golden training set.

mod golden;
mod scoring;
mod skills;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use golden::{build_golden_set, GoldenConfig};
pub(crate) use scoring::csv_field;
pub use scoring::{assign_levels, classify_shape, label_users, precision, recall, score_skill, Labels, UserShape};
pub use skills::{
    apply_skill_overrides, cluster_tags, read_overrides, similarity_matrix, tag_similarity, top_tags, OverrideAction,
    SkillOverride,
};

use crate::corpus::{Corpus, PostId, UserId};
use crate::error::{Error, Result};

/// A named query: a set of related tags and the answers they select.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillArea {
    pub name: String,
    pub tags: BTreeSet<String>,
    pub documents: Vec<PostId>,
}

impl SkillArea {
    pub fn new(corpus: &Corpus, name: impl Into<String>, tags: BTreeSet<String>) -> Result<Self> {
        let tag_list: Vec<&String> = tags.iter().collect();
        let documents = corpus
            .documents_of_tagset(&tag_list)?
            .iter()
            .map(|p| p.post_id)
            .collect();
        Ok(SkillArea {
            name: name.into(),
            tags,
            documents,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnowledgeLevel {
    Advanced,
    Intermediate,
    Beginner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertiseShape {
    TShaped,
    CShaped,
    NonExpert,
}

impl KnowledgeLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            KnowledgeLevel::Advanced => "advanced",
            KnowledgeLevel::Intermediate => "intermediate",
            KnowledgeLevel::Beginner => "beginner",
        }
    }
}

impl ExpertiseShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ExpertiseShape::TShaped => "t_shaped",
            ExpertiseShape::CShaped => "c_shaped",
            ExpertiseShape::NonExpert => "non_expert",
        }
    }
}

impl fmt::Display for ExpertiseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExpertiseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t_shaped" => Ok(ExpertiseShape::TShaped),
            "c_shaped" => Ok(ExpertiseShape::CShaped),
            "non_expert" => Ok(ExpertiseShape::NonExpert),
            other => Err(Error::invalid(format!("unknown shape `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSkillScore {
    pub user: UserId,
    pub skill: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub level: KnowledgeLevel,
}

/// Harmonic mean with the zero convention for `p + r = 0`.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenPair {
    pub user: UserId,
    pub skill: String,
    pub target: i8,
    pub split: Split,
}

/// Which shape the model is trained to put on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMode {
    #[default]
    TRanking,
    CRanking,
}

impl FromStr for RankingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t_ranking" => Ok(RankingMode::TRanking),
            "c_ranking" => Ok(RankingMode::CRanking),
            other => Err(Error::invalid(format!(
                "unknown mode `{other}` (expected t_ranking or c_ranking)"
            ))),
        }
    }
}

/// How a user relates to one skill area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// T-shaped, with this skill as the advanced one.
    TExpert,
    /// C-shaped, with this skill among the advanced ones.
    CExpert,
    Other,
}

impl RankingMode {
    /// Training target for `o3`.
    pub fn target(self, rel: Relation) -> i8 {
        match (self, rel) {
            (_, Relation::Other) => -1,
            (RankingMode::TRanking, Relation::TExpert) | (RankingMode::CRanking, Relation::CExpert) => 1,
            _ => 0,
        }
    }

    /// Graded relevance used by the ranking metrics.
    pub fn grade(self, rel: Relation) -> u8 {
        (self.target(rel) + 1) as u8
    }
}
