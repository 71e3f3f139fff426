//! Post ingestion and the indexes the rest of the pipeline reads from.

mod jsonl;
mod post;
mod xml;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

pub use jsonl::ingest_jsonl;
pub use post::{Post, PostId, PostKind, UserId};
pub use xml::ingest_xml;

use crate::error::{Error, Result};

pub const CORPUS_MAGIC: &str = "ESM-CORPUS-v1";

/// Result of reading a post dump: the corpus plus what was dropped on the way.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub corpus: Corpus,
    /// Rows skipped because their post type is neither question nor answer.
    pub skipped: usize,
    pub warnings: Vec<String>,
}

/// Validated, immutable collection of posts with the lookup indexes used for
/// skill extraction, labelling, and embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    posts: BTreeMap<PostId, Post>,
    users: BTreeSet<UserId>,
    tag_counts: BTreeMap<String, usize>,
    questions_by_tag: BTreeMap<String, Vec<PostId>>,
    answers_by_user: BTreeMap<UserId, Vec<PostId>>,
    answers_by_tag: BTreeMap<String, Vec<PostId>>,
    answers_by_question: BTreeMap<PostId, Vec<PostId>>,
}

impl Corpus {
    /// Validates `posts` and builds every index.
    ///
    /// Answers whose parent is missing and questions without tags are dropped
    /// with a warning; duplicate ids and double-accepted questions are errors.
    pub fn build(posts: Vec<Post>) -> Result<(Corpus, Vec<String>)> {
        let mut by_id = BTreeMap::new();
        for post in posts {
            let id = post.post_id;
            if by_id.insert(id, post).is_some() {
                return Err(Error::DuplicatePost(id.0));
            }
        }

        let mut warnings = Vec::new();
        let mut dropped = Vec::new();
        for post in by_id.values() {
            match post.kind {
                PostKind::Question if post.tags.is_empty() => {
                    warnings.push(format!("question {} has no tags; dropped", post.post_id));
                    dropped.push(post.post_id);
                }
                PostKind::Answer => match post.parent_id {
                    None => {
                        warnings.push(format!("answer {} has no parent; dropped", post.post_id));
                        dropped.push(post.post_id);
                    }
                    Some(parent) => {
                        let ok = by_id
                            .get(&parent)
                            .is_some_and(|q| q.kind == PostKind::Question && !q.tags.is_empty());
                        if !ok {
                            warnings.push(format!(
                                "answer {} references unknown question {}; dropped",
                                post.post_id, parent
                            ));
                            dropped.push(post.post_id);
                        }
                    }
                },
                _ => {}
            }
        }
        for id in dropped {
            by_id.remove(&id);
        }

        let mut corpus = Corpus {
            posts: BTreeMap::new(),
            users: BTreeSet::new(),
            tag_counts: BTreeMap::new(),
            questions_by_tag: BTreeMap::new(),
            answers_by_user: BTreeMap::new(),
            answers_by_tag: BTreeMap::new(),
            answers_by_question: BTreeMap::new(),
        };

        for post in by_id.values() {
            if let Some(owner) = post.owner {
                corpus.users.insert(owner);
            }
            match post.kind {
                PostKind::Question => {
                    for tag in &post.tags {
                        corpus
                            .questions_by_tag
                            .entry(tag.clone())
                            .or_default()
                            .push(post.post_id);
                    }
                }
                PostKind::Answer => {
                    let parent = post.parent_id.expect("validated above");
                    corpus.answers_by_question.entry(parent).or_default().push(post.post_id);
                    if let Some(owner) = post.owner {
                        corpus.answers_by_user.entry(owner).or_default().push(post.post_id);
                    }
                    for tag in &by_id[&parent].tags {
                        corpus.answers_by_tag.entry(tag.clone()).or_default().push(post.post_id);
                    }
                }
            }
        }

        for (question, answers) in &corpus.answers_by_question {
            let accepted = answers.iter().filter(|a| by_id[a].accepted).count();
            if accepted > 1 {
                return Err(Error::InvalidCorpus(format!(
                    "question {question} has {accepted} accepted answers"
                )));
            }
        }

        corpus.tag_counts = corpus
            .questions_by_tag
            .iter()
            .map(|(t, qs)| (t.clone(), qs.len()))
            .collect();
        corpus.posts = by_id;

        let posts = &corpus.posts;
        let chrono_key = |id: &PostId| (posts[id].created_at, *id);
        for list in corpus
            .answers_by_user
            .values_mut()
            .chain(corpus.answers_by_tag.values_mut())
            .chain(corpus.answers_by_question.values_mut())
        {
            list.sort_by_key(chrono_key);
        }

        Ok((corpus, warnings))
    }

    pub fn empty() -> Corpus {
        Corpus::build(Vec::new()).expect("empty corpus is valid").0
    }

    pub fn post(&self, id: PostId) -> Option<&Post> {
        self.posts.get(&id)
    }

    pub fn posts(&self) -> impl Iterator<Item = &Post> {
        self.posts.values()
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Every answer post, ordered by id. This is the document collection.
    pub fn answers(&self) -> impl Iterator<Item = &Post> {
        self.posts.values().filter(|p| p.kind == PostKind::Answer)
    }

    pub fn num_answers(&self) -> usize {
        self.answers_by_question.values().map(Vec::len).sum()
    }

    /// Candidate experts: every user owning at least one post.
    pub fn users(&self) -> &BTreeSet<UserId> {
        &self.users
    }

    pub fn tag_counts(&self) -> &BTreeMap<String, usize> {
        &self.tag_counts
    }

    /// Questions carrying `tag`, ordered by id.
    pub fn questions_with_tag(&self, tag: &str) -> &[PostId] {
        self.questions_by_tag.get(tag).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn answers_by_user(&self) -> &BTreeMap<UserId, Vec<PostId>> {
        &self.answers_by_user
    }

    pub fn answers_by_tag(&self) -> &BTreeMap<String, Vec<PostId>> {
        &self.answers_by_tag
    }

    /// Answers owned by `user` in chronological order, ties by post id.
    pub fn documents_of_user(&self, user: UserId) -> Vec<&Post> {
        self.answers_by_user
            .get(&user)
            .map(|ids| ids.iter().map(|id| &self.posts[id]).collect())
            .unwrap_or_default()
    }

    /// Answers to questions tagged with any of `tags`, deduplicated and in
    /// chronological order.
    pub fn documents_of_tagset<S: AsRef<str>>(&self, tags: &[S]) -> Result<Vec<&Post>> {
        if tags.is_empty() {
            return Err(Error::invalid("tag set must not be empty"));
        }
        let ids: BTreeSet<PostId> = tags
            .iter()
            .filter_map(|t| self.answers_by_tag.get(t.as_ref()))
            .flatten()
            .copied()
            .collect();
        let mut docs: Vec<&Post> = ids.into_iter().map(|id| &self.posts[&id]).collect();
        docs.sort_by_key(|p| (p.created_at, p.post_id));
        Ok(docs)
    }

    /// Parent question of an answer.
    pub fn question_of(&self, answer: &Post) -> Option<&Post> {
        answer.parent_id.and_then(|id| self.posts.get(&id))
    }

    /// Writes the versioned corpus cache.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let posts: Vec<&Post> = self.posts.values().collect();
        let mut buf = Vec::new();
        writeln!(buf, "{CORPUS_MAGIC}").expect("write to vec");
        serde_json::to_writer(&mut buf, &posts)?;
        buf.push(b'\n');
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn read_cache(path: &Path) -> Result<Corpus> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (header, body) = text.split_once('\n').unwrap_or((text.as_str(), ""));
        if header != CORPUS_MAGIC {
            return Err(Error::Version {
                expected: CORPUS_MAGIC.into(),
                found: header.chars().take(32).collect(),
            });
        }
        let posts: Vec<Post> = serde_json::from_str(body)?;
        Ok(Corpus::build(posts)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn at(secs: i64) -> chrono::DateTime<Utc> {
        Utc.timestamp_opt(secs, 0).unwrap()
    }

    fn question(id: i64, tags: &[&str]) -> Post {
        Post::question(
            PostId(id),
            Some(UserId(1)),
            tags.iter().map(|t| t.to_string()),
            "",
            at(0),
        )
    }

    fn answer(id: i64, parent: i64, owner: i64, t: i64) -> Post {
        Post::answer(PostId(id), PostId(parent), Some(UserId(owner)), "", at(t), false)
    }

    #[test]
    fn documents_of_user_are_chronological() {
        let posts = vec![question(1, &["java"]), answer(2, 1, 10, 5), answer(3, 1, 10, 2)];
        let (c, _) = Corpus::build(posts).unwrap();
        let ids: Vec<_> = c.documents_of_user(UserId(10)).iter().map(|p| p.post_id.0).collect();
        assert_eq!(ids, vec![3, 2]);
        assert!(c.documents_of_user(UserId(999)).is_empty());
    }

    #[test]
    fn identical_timestamps_break_ties_by_id() {
        let posts = vec![question(1, &["java"]), answer(7, 1, 10, 4), answer(3, 1, 10, 4)];
        let (c, _) = Corpus::build(posts).unwrap();
        let ids: Vec<_> = c.documents_of_user(UserId(10)).iter().map(|p| p.post_id.0).collect();
        assert_eq!(ids, vec![3, 7]);
    }

    #[test]
    fn tagset_union_is_deduplicated() {
        let posts = vec![
            question(1, &["java", "spring"]),
            answer(2, 1, 10, 1),
            answer(3, 1, 11, 2),
            question(4, &["python"]),
            answer(5, 4, 10, 3),
        ];
        let (c, _) = Corpus::build(posts).unwrap();
        let ids: Vec<_> = c
            .documents_of_tagset(&["spring", "spring-mvc"])
            .unwrap()
            .iter()
            .map(|p| p.post_id.0)
            .collect();
        assert_eq!(ids, vec![2, 3]);
        let java: Vec<_> = c
            .documents_of_tagset(&["java"])
            .unwrap()
            .iter()
            .map(|p| p.post_id.0)
            .collect();
        assert_eq!(java, vec![2, 3]);
        assert!(c.documents_of_tagset::<&str>(&[]).is_err());
    }

    #[test]
    fn orphan_answers_are_dropped_with_warning() {
        let posts = vec![question(1, &["java"]), answer(2, 99, 10, 1)];
        let (c, warnings) = Corpus::build(posts).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let posts = vec![question(1, &["java"]), answer(1, 1, 10, 1)];
        assert!(matches!(Corpus::build(posts), Err(Error::DuplicatePost(1))));
    }

    #[test]
    fn two_accepted_answers_are_rejected() {
        let mut a = answer(2, 1, 10, 1);
        let mut b = answer(3, 1, 11, 1);
        a.accepted = true;
        b.accepted = true;
        assert!(Corpus::build(vec![question(1, &["java"]), a, b]).is_err());
    }

    #[test]
    fn ownerless_posts_stay_in_collection() {
        let mut a = answer(2, 1, 10, 1);
        a.owner = None;
        let (c, _) = Corpus::build(vec![question(1, &["java"]), a]).unwrap();
        assert_eq!(c.num_answers(), 1);
        assert_eq!(c.users().len(), 1); // only the asker
        assert_eq!(c.documents_of_tagset(&["java"]).unwrap().len(), 1);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.json");
        let posts = vec![question(1, &["java"]), answer(2, 1, 10, 5)];
        let (c, _) = Corpus::build(posts).unwrap();
        c.write_cache(&path).unwrap();
        assert_eq!(Corpus::read_cache(&path).unwrap(), c);

        std::fs::write(&path, "ESM-CORPUS-v0\n[]").unwrap();
        assert!(matches!(Corpus::read_cache(&path), Err(Error::Version { .. })));
    }
}
