use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GoldenPair, Labels, RankingMode, Relation, SkillArea, Split};
use crate::corpus::{Corpus, UserId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoldenConfig {
    pub mode: RankingMode,
    /// Sampled `-1` pairs per query, as a multiple of that query's `1`/`0` pairs.
    pub negative_ratio: f64,
    pub seed: u64,
}

impl Default for GoldenConfig {
    fn default() -> Self {
        GoldenConfig {
            mode: RankingMode::TRanking,
            negative_ratio: 2.0,
            seed: 3,
        }
    }
}

/// Split sizes for a class of `m` pairs: 60% train, 20% validation, rest test.
pub(crate) fn split_sizes(m: usize) -> (usize, usize) {
    let train = (0.6 * m as f64).round() as usize;
    let val = ((0.2 * m as f64).round() as usize).min(m - train);
    (train, val)
}

/// Labelled (user, skill) pairs with targets in {1, 0, -1} and a seeded
/// 60/20/20 split within each target class.
///
/// Every user related to a skill as the ranked shape or the other expert
/// shape is paired with it; `-1` pairs are drawn from all remaining users of
/// the corpus.
pub fn build_golden_set(
    corpus: &Corpus,
    skills: &[SkillArea],
    labels: &Labels,
    config: &GoldenConfig,
) -> Result<Vec<GoldenPair>> {
    if !(config.negative_ratio >= 0.0) {
        return Err(Error::invalid("negative_ratio must be >= 0"));
    }
    if let Some(u) = corpus.users().iter().find(|u| !labels.shapes.contains_key(u)) {
        return Err(Error::invalid(format!("user {u} has no shape label")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut by_class: BTreeMap<i8, Vec<(String, UserId)>> = BTreeMap::new();
    for skill in skills {
        let mut positives = 0usize;
        let mut pool = Vec::new();
        for &user in corpus.users() {
            match labels.relation(user, &skill.name) {
                Relation::Other => pool.push(user),
                rel => {
                    positives += 1;
                    by_class
                        .entry(config.mode.target(rel))
                        .or_default()
                        .push((skill.name.clone(), user));
                }
            }
        }
        let want = ((positives as f64) * config.negative_ratio).round() as usize;
        let mut negatives: Vec<UserId> = pool.choose_multiple(&mut rng, want.min(pool.len())).copied().collect();
        negatives.sort();
        by_class
            .entry(-1)
            .or_default()
            .extend(negatives.into_iter().map(|u| (skill.name.clone(), u)));
    }

    let mut pairs = Vec::new();
    for (target, mut members) in by_class {
        members.shuffle(&mut rng);
        let (train, val) = split_sizes(members.len());
        for (i, (skill, user)) in members.into_iter().enumerate() {
            let split = if i < train {
                Split::Train
            } else if i < train + val {
                Split::Validation
            } else {
                Split::Test
            };
            pairs.push(GoldenPair {
                user,
                skill,
                target,
                split,
            });
        }
    }
    pairs.sort_by(|a, b| a.skill.cmp(&b.skill).then(a.user.cmp(&b.user)));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Post, PostId};
    use crate::labels::{ExpertiseShape, UserShape};
    use chrono::{TimeZone, Utc};

    fn fixture(t: usize, c: usize, ne: usize) -> (Corpus, Vec<SkillArea>, Labels) {
        let ts = Utc.timestamp_opt(0, 0).unwrap();
        let mut posts = vec![
            Post::question(PostId(1), None, ["a".to_string()], "", ts),
            Post::question(PostId(2), None, ["b".to_string()], "", ts),
        ];
        let mut shapes = BTreeMap::new();
        let mut id = 10;
        for (shape, count) in [
            (ExpertiseShape::TShaped, t),
            (ExpertiseShape::CShaped, c),
            (ExpertiseShape::NonExpert, ne),
        ] {
            for _ in 0..count {
                posts.push(Post::answer(PostId(id), PostId(1), Some(UserId(id)), "", ts, false));
                let advanced = match shape {
                    ExpertiseShape::TShaped => vec!["A".to_string()],
                    ExpertiseShape::CShaped => vec!["A".to_string(), "B".to_string()],
                    ExpertiseShape::NonExpert => vec![],
                };
                shapes.insert(
                    UserId(id),
                    UserShape {
                        shape,
                        advanced,
                        intermediate: vec![],
                    },
                );
                id += 1;
            }
        }
        let corpus = Corpus::build(posts).unwrap().0;
        let skills = vec![
            SkillArea::new(&corpus, "A", ["a".to_string()].into()).unwrap(),
            SkillArea::new(&corpus, "B", ["b".to_string()].into()).unwrap(),
        ];
        let labels = Labels {
            scores: vec![],
            shapes,
            fallthrough: vec![],
        };
        (corpus, skills, labels)
    }

    #[test]
    fn targets_follow_shape() {
        let (corpus, skills, labels) = fixture(1, 1, 3);
        let pairs = build_golden_set(&corpus, &skills, &labels, &GoldenConfig::default()).unwrap();
        let t = |user: i64, skill: &str| {
            pairs
                .iter()
                .find(|p| p.user == UserId(user) && p.skill == skill)
                .map(|p| p.target)
        };
        assert_eq!(t(10, "A"), Some(1));
        assert_eq!(t(11, "A"), Some(0));
        assert_eq!(t(11, "B"), Some(0));
        assert!(pairs
            .iter()
            .filter(|p| p.target == -1)
            .all(|p| p.user.0 >= 12 || p.skill == "B"));
        assert!(pairs.iter().any(|p| p.target == -1));
    }

    #[test]
    fn c_ranking_swaps_expert_targets() {
        let (corpus, skills, labels) = fixture(1, 1, 3);
        let cfg = GoldenConfig {
            mode: RankingMode::CRanking,
            ..Default::default()
        };
        let pairs = build_golden_set(&corpus, &skills, &labels, &cfg).unwrap();
        let a: Vec<_> = pairs
            .iter()
            .filter(|p| p.skill == "A" && p.target >= 0)
            .map(|p| (p.user.0, p.target))
            .collect();
        assert_eq!(a, vec![(10, 0), (11, 1)]);
    }

    #[test]
    fn split_is_60_20_20_per_class_and_seeded() {
        let (corpus, skills, labels) = fixture(100, 0, 400);
        let cfg = GoldenConfig {
            negative_ratio: 1.0,
            ..Default::default()
        };
        let pairs = build_golden_set(&corpus, &skills[..1], &labels, &cfg).unwrap();
        for target in [1, -1] {
            let class: Vec<_> = pairs.iter().filter(|p| p.target == target).collect();
            assert_eq!(class.len(), 100);
            let n = |s| class.iter().filter(|p| p.split == s).count();
            assert_eq!((n(Split::Train), n(Split::Validation), n(Split::Test)), (60, 20, 20));
        }
        assert_eq!(pairs, build_golden_set(&corpus, &skills[..1], &labels, &cfg).unwrap());
        let other = GoldenConfig { seed: 99, ..cfg };
        assert_ne!(pairs, build_golden_set(&corpus, &skills[..1], &labels, &other).unwrap());
    }

    #[test]
    fn split_sizes_within_one() {
        for m in 0..200 {
            let (tr, va) = split_sizes(m);
            let te = m - tr - va;
            assert!((tr as f64 - 0.6 * m as f64).abs() <= 1.0);
            assert!((va as f64 - 0.2 * m as f64).abs() <= 1.0);
            assert!((te as f64 - 0.2 * m as f64).abs() <= 1.0);
        }
    }

    #[test]
    fn unknown_mode_string() {
        assert!("x_ranking".parse::<RankingMode>().is_err());
        assert_eq!("c_ranking".parse::<RankingMode>().unwrap(), RankingMode::CRanking);
    }
}
