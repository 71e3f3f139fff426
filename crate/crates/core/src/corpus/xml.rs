use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Corpus, Ingested, Post, PostId, PostKind, UserId};
use crate::error::{Error, Result};

/// Reads a dump-format `Posts.xml`: one `<row .../>` per post.
pub fn ingest_xml(path: &Path) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_xml(&text)
}

fn line_of(text: &str, pos: u64) -> usize {
    let end = (pos as usize).min(text.len());
    1 + text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count()
}

struct Row {
    id: i64,
    type_id: i64,
    parent: Option<i64>,
    accepted_answer: Option<i64>,
    owner: Option<i64>,
    tags: BTreeSet<String>,
    body: String,
    created_at: DateTime<Utc>,
}

pub(crate) fn parse_xml(text: &str) -> Result<Ingested> {
    let mut reader = Reader::from_str(text);
    let mut rows = Vec::new();
    loop {
        let start = reader.buffer_position();
        let event = reader.read_event().map_err(|e| Error::Parse {
            line: line_of(text, reader.error_position()),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"row" => {
                let line = line_of(text, start);
                rows.push(parse_row(&e).map_err(|message| Error::Parse { line, message })?);
            }
            Event::Eof => break,
            _ => {}
        }
    }

    let mut skipped = 0;
    let mut accepted_ids: BTreeMap<i64, i64> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for row in &rows {
        if !seen.insert(row.id) {
            return Err(Error::DuplicatePost(row.id));
        }
        if let (1, Some(a)) = (row.type_id, row.accepted_answer) {
            accepted_ids.insert(row.id, a);
        }
    }

    let mut posts = Vec::with_capacity(rows.len());
    for row in rows {
        let post = match row.type_id {
            1 => Post {
                post_id: PostId(row.id),
                kind: PostKind::Question,
                parent_id: None,
                owner: row.owner.map(UserId),
                tags: row.tags,
                body: row.body,
                created_at: row.created_at,
                accepted: false,
            },
            2 => {
                let accepted = row
                    .parent
                    .and_then(|p| accepted_ids.get(&p))
                    .is_some_and(|&a| a == row.id);
                Post {
                    post_id: PostId(row.id),
                    kind: PostKind::Answer,
                    parent_id: row.parent.map(PostId),
                    owner: row.owner.map(UserId),
                    tags: BTreeSet::new(),
                    body: row.body,
                    created_at: row.created_at,
                    accepted,
                }
            }
            _ => {
                skipped += 1;
                continue;
            }
        };
        posts.push(post);
    }

    let (corpus, warnings) = Corpus::build(posts)?;
    Ok(Ingested {
        corpus,
        skipped,
        warnings,
    })
}

/// Splits `<a><b>` or `|a|b|` tag lists.
fn parse_tags(raw: &str) -> BTreeSet<String> {
    raw.split(['<', '>', '|'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|t| t.and_utc())
}

fn parse_row(e: &BytesStart<'_>) -> std::result::Result<Row, String> {
    let mut id = None;
    let mut type_id = None;
    let mut parent = None;
    let mut accepted_answer = None;
    let mut owner = None;
    let mut tags = BTreeSet::new();
    let mut body = String::new();
    let mut created_at = None;

    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = attr.key.as_ref().to_vec();
        let value = attr.unescape_value().map_err(|e| e.to_string())?;
        let int = |name: &str| {
            value
                .trim()
                .parse::<i64>()
                .map_err(|_| format!("attribute {name}: `{value}` is not an integer"))
        };
        match key.as_slice() {
            b"Id" => id = Some(int("Id")?),
            b"PostTypeId" => type_id = Some(int("PostTypeId")?),
            b"ParentId" => parent = Some(int("ParentId")?),
            b"AcceptedAnswerId" => accepted_answer = Some(int("AcceptedAnswerId")?),
            b"OwnerUserId" => owner = Some(int("OwnerUserId")?),
            b"Tags" => tags = parse_tags(&value),
            b"Body" => body = value.into_owned(),
            b"CreationDate" => {
                created_at =
                    Some(parse_timestamp(&value).ok_or_else(|| format!("CreationDate `{value}` is not a timestamp"))?)
            }
            _ => {}
        }
    }

    Ok(Row {
        id: id.ok_or("row without Id")?,
        type_id: type_id.ok_or("row without PostTypeId")?,
        parent,
        accepted_answer,
        owner,
        tags,
        body,
        created_at: created_at.ok_or("row without CreationDate")?,
    })
}
