use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PostId(pub i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub i64);

impl fmt::Display for PostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostKind {
    Question,
    Answer,
}

/// One question or answer. Field names double as the JSONL keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Post {
    pub post_id: PostId,
    pub kind: PostKind,
    #[serde(default)]
    pub parent_id: Option<PostId>,
    #[serde(default)]
    pub owner: Option<UserId>,
    #[serde(default)]
    pub tags: BTreeSet<String>,
    #[serde(default)]
    pub body: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub accepted: bool,
}

impl Post {
    pub fn question(
        post_id: PostId,
        owner: Option<UserId>,
        tags: impl IntoIterator<Item = String>,
        body: impl Into<String>,
        created_at: DateTime<Utc>,
    ) -> Post {
        Post {
            post_id,
            kind: PostKind::Question,
            parent_id: None,
            owner,
            tags: tags.into_iter().collect(),
            body: body.into(),
            created_at,
            accepted: false,
        }
    }

    pub fn answer(
        post_id: PostId,
        parent_id: PostId,
        owner: Option<UserId>,
        body: impl Into<String>,
        created_at: DateTime<Utc>,
        accepted: bool,
    ) -> Post {
        Post {
            post_id,
            kind: PostKind::Answer,
            parent_id: Some(parent_id),
            owner,
            tags: BTreeSet::new(),
            body: body.into(),
            created_at,
            accepted,
        }
    }

    pub fn is_answer(&self) -> bool {
        self.kind == PostKind::Answer
    }
}
