//! Small seeded fixtures.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tshape_core::corpus::{Post, PostId, UserId};
use tshape_core::pipeline::{generate_synthetic, PipelineConfig, SynthSpec};

/// Random corpus with up to `max_users` users and up to `max_skills` skill
/// areas of one to three tags each. Questions may carry tags of several
/// skills; each question has at most one accepted answer.
pub fn random_labeling_corpus(seed: u64, max_users: usize, max_skills: usize) -> (Vec<Post>, Vec<BTreeSet<String>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = rng.gen_range(1..=max_users) as i64;
    let skills: Vec<BTreeSet<String>> = (0..rng.gen_range(1..=max_skills))
        .map(|s| (0..rng.gen_range(1..=3)).map(|t| format!("k{s}x{t}")).collect())
        .collect();
    let all_tags: Vec<String> = skills.iter().flatten().cloned().collect();
    let t0 = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
    let mut posts = Vec::new();
    let mut id = 1i64;
    for _ in 0..rng.gen_range(1..40) {
        let qid = PostId(id);
        id += 1;
        let tags: BTreeSet<String> = (0..rng.gen_range(1..=2))
            .map(|_| all_tags.choose(&mut rng).unwrap().clone())
            .collect();
        let asker = rng.gen_bool(0.5).then(|| UserId(rng.gen_range(1..=users)));
        let ts = t0 + Duration::minutes(rng.gen_range(0..10_000));
        posts.push(Post::question(qid, asker, tags, "q", ts));
        let mut accepted_left = true;
        for _ in 0..rng.gen_range(0..6) {
            let accepted = accepted_left && rng.gen_bool(0.4);
            accepted_left &= !accepted;
            let owner = Some(UserId(rng.gen_range(1..=users)));
            let ts = t0 + Duration::minutes(rng.gen_range(0..10_000));
            posts.push(Post::answer(PostId(id), qid, owner, "a", ts, accepted));
            id += 1;
        }
    }
    (posts, skills)
}

/// A reduced synthetic corpus written to `dir` with a configuration that
/// runs the whole pipeline in a few seconds.
pub fn quick_pipeline(dir: &Path, overrides: &[(String, String)]) -> PipelineConfig {
    let spec = SynthSpec {
        num_t_shaped: 9,
        num_c_shaped: 3,
        num_non_expert: 30,
        answers_per_user: 12,
        questions_per_skill: 120,
        ..Default::default()
    };
    generate_synthetic(&spec).unwrap().write(dir).unwrap();
    let text = r#"{
        "embedding": { "num_topics": 6, "alpha": 0.1, "iterations": 60, "fold_in_sweeps": 10 },
        "model": { "n": 12, "m_d": 6, "m_c": 8, "m_q": 8 },
        "golden": { "negative_ratio": 100.0 },
        "training": { "epochs": 15, "patience": 5 },
        "eval": { "cutoffs": [5, 10], "random_permutations": 10 }
    }"#;
    PipelineConfig::from_json(text, overrides, dir).unwrap()
}

/// Two groups of documents over disjoint vocabularies.
pub fn two_vocabularies(docs_per_group: usize, words_per_doc: usize, seed: u64) -> (Vec<Vec<String>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut groups = Vec::new();
    for g in 0..2 {
        for _ in 0..docs_per_group {
            docs.push(
                (0..words_per_doc)
                    .map(|_| format!("g{g}w{}", rng.gen_range(0..10)))
                    .collect(),
            );
            groups.push(g);
        }
    }
    (docs, groups)
}

/// Mean cosine within groups and across groups.
pub fn group_cosines(vectors: &[Vec<f64>], groups: &[usize]) -> (f64, f64) {
    let cos = |a: &[f64], b: &[f64]| {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    };
    let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let c = cos(&vectors[i], &vectors[j]);
            if groups[i] == groups[j] {
                within += c;
                nw += 1;
            } else {
                cross += c;
                nc += 1;
            }
        }
    }
    (within / nw as f64, cross / nc as f64)
}
