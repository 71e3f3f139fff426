use std::fs;
use std::path::Path;

use super::{Corpus, Ingested, Post, PostKind};
use crate::error::{Error, Result};

/// Reads one JSON post object per line. Blank lines are ignored.
pub fn ingest_jsonl(path: &Path) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&text)
}

pub(crate) fn parse_jsonl(text: &str) -> Result<Ingested> {
    let mut posts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let post: Post = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if post.kind == PostKind::Question && post.accepted {
            return Err(Error::Parse {
                line: i + 1,
                message: "questions cannot be marked accepted".into(),
            });
        }
        posts.push(post);
    }
    let (corpus, warnings) = Corpus::build(posts)?;
    Ok(Ingested {
        corpus,
        skipped: 0,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_empty_corpus() {
        let ing = parse_jsonl("").unwrap();
        assert!(ing.corpus.is_empty());
        assert!(ing.corpus.users().is_empty());
    }

    #[test]
    fn missing_key_names_line_and_key() {
        let text = "{\"post_id\":1,\"kind\":\"question\",\"tags\":[\"a\"],\"created_at\":\"2020-01-01T00:00:00Z\"}\n\
                    {\"kind\":\"answer\",\"parent_id\":1,\"created_at\":\"2020-01-01T00:00:00Z\"}\n";
        let err = parse_jsonl(text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{msg}");
        assert!(msg.contains("post_id"), "{msg}");
    }

    #[test]
    fn unknown_kind_is_an_error() {
        let text = "{\"post_id\":1,\"kind\":\"wiki\",\"created_at\":\"2020-01-01T00:00:00Z\"}";
        assert!(matches!(parse_jsonl(text), Err(Error::Parse { line: 1, .. })));
    }
}
