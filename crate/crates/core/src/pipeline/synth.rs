use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Post, PostId, UserId};
use crate::error::{Error, Result};
use crate::labels::ExpertiseShape;

/// Accepted-answer probabilities for the three activity levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateProfile {
    pub high: f64,
    pub moderate: f64,
    pub low: f64,
}

impl Default for RateProfile {
    fn default() -> Self {
        RateProfile {
            high: 0.95,
            moderate: 0.3,
            low: 0.05,
        }
    }
}

/// Recipe for a corpus with planted expertise shapes.
///
/// * T-shaped users answer `answers_per_user` questions in one main skill at
///   the high rate, `secondary_share` of that in one other skill at the
///   moderate rate, and `other_share` in each remaining skill at the low rate.
/// * C-shaped users answer `c_share` of `answers_per_user` in each of two
///   skills at the high rate and `other_share` elsewhere at the low rate.
/// * Non-experts answer `non_expert_share` of `answers_per_user`, mostly in
///   one focus skill and at least once in every other, all at the low rate.
///
/// Accepted answers draw `expert_word_share` of their words from the skill's
/// expert vocabulary; every answer carries one tag word of its question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub num_skills: usize,
    pub tags_per_skill: usize,
    pub num_t_shaped: usize,
    pub num_c_shaped: usize,
    pub num_non_expert: usize,
    pub answers_per_user: usize,
    pub questions_per_skill: usize,
    pub words_per_answer: usize,
    pub vocab_per_skill: usize,
    pub generic_vocab: usize,
    pub rates: RateProfile,
    pub secondary_share: f64,
    pub c_share: f64,
    pub other_share: f64,
    pub non_expert_share: f64,
    pub expert_word_share: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            num_skills: 3,
            tags_per_skill: 3,
            num_t_shaped: 20,
            num_c_shaped: 10,
            num_non_expert: 170,
            answers_per_user: 30,
            questions_per_skill: 600,
            words_per_answer: 25,
            vocab_per_skill: 40,
            generic_vocab: 60,
            rates: RateProfile::default(),
            secondary_share: 0.4,
            c_share: 0.6,
            other_share: 0.1,
            non_expert_share: 0.34,
            expert_word_share: 0.6,
            seed: 42,
        }
    }
}

pub const MAX_SKILLS: usize = 50;
pub const MAX_TAGS_PER_SKILL: usize = 20;
pub const MAX_USERS: usize = 100_000;
pub const MAX_ANSWERS_PER_USER: usize = 10_000;
pub const MAX_QUESTIONS_PER_SKILL: usize = 100_000;
pub const MAX_VOCAB: usize = 10_000;
pub const MAX_WORDS_PER_ANSWER: usize = 1_000;

impl SynthSpec {
    pub fn num_users(&self) -> usize {
        self.num_t_shaped + self.num_c_shaped + self.num_non_expert
    }

    pub fn validate(&self) -> Result<()> {
        let over = |what: &str, v: usize, max: usize| {
            if v > max {
                Err(Error::invalid(format!("{what} = {v} exceeds the maximum of {max}")))
            } else {
                Ok(())
            }
        };
        over("num_skills", self.num_skills, MAX_SKILLS)?;
        over("tags_per_skill", self.tags_per_skill, MAX_TAGS_PER_SKILL)?;
        over("total users", self.num_users(), MAX_USERS)?;
        over("answers_per_user", self.answers_per_user, MAX_ANSWERS_PER_USER)?;
        over("questions_per_skill", self.questions_per_skill, MAX_QUESTIONS_PER_SKILL)?;
        over("vocab_per_skill", self.vocab_per_skill, MAX_VOCAB)?;
        over("generic_vocab", self.generic_vocab, MAX_VOCAB)?;
        over("words_per_answer", self.words_per_answer, MAX_WORDS_PER_ANSWER)?;
        if self.num_skills == 0 || self.tags_per_skill == 0 {
            return Err(Error::invalid("num_skills and tags_per_skill must be >= 1"));
        }
        if self.questions_per_skill == 0 {
            return Err(Error::invalid("questions_per_skill must be >= 1"));
        }
        if (self.num_t_shaped > 0 || self.num_c_shaped > 0) && self.num_skills < 2 {
            return Err(Error::invalid("T- and C-shaped users need at least two skills"));
        }
        if self.vocab_per_skill == 0 || self.generic_vocab == 0 {
            return Err(Error::invalid("vocabularies must be nonempty"));
        }
        let r = &self.rates;
        for (name, v) in [
            ("rates.high", r.high),
            ("rates.moderate", r.moderate),
            ("rates.low", r.low),
            ("secondary_share", self.secondary_share),
            ("c_share", self.c_share),
            ("other_share", self.other_share),
            ("non_expert_share", self.non_expert_share),
            ("expert_word_share", self.expert_word_share),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn tag(&self, skill: usize, j: usize) -> String {
        format!("s{skill}t{j}")
    }
}

/// Planted shape of one generated user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub user: UserId,
    pub shape: ExpertiseShape,
    /// Skills the user was planted as advanced in.
    pub skills: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub posts: Vec<Post>,
    pub truth: Vec<TruthRow>,
}

impl Synthetic {
    pub fn corpus(&self) -> Result<Corpus> {
        Ok(Corpus::build(self.posts.clone())?.0)
    }

    pub fn jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for p in &self.posts {
            out.push_str(&serde_json::to_string(p)?);
            out.push('\n');
        }
        Ok(out)
    }

    /// `user,shape,skills` with skills as `;`-separated indices.
    pub fn truth_csv(&self) -> String {
        let mut out = String::from("user,shape,skills\n");
        for t in &self.truth {
            let skills: Vec<String> = t.skills.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{},{},{}", t.user, t.shape, skills.join(";"));
        }
        out
    }

    /// Writes `corpus.jsonl` and `truth.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let corpus = dir.join("corpus.jsonl");
        let truth = dir.join("truth.csv");
        fs::write(&corpus, self.jsonl()?).map_err(|e| Error::io(&corpus, e))?;
        fs::write(&truth, self.truth_csv()).map_err(|e| Error::io(&truth, e))?;
        Ok((corpus, truth))
    }
}

struct Event {
    user: UserId,
    skill: usize,
    rate: f64,
}

fn words(rng: &mut ChaCha8Rng, prefix: &str, size: usize, count: usize, out: &mut Vec<String>) {
    for _ in 0..count {
        out.push(format!("{prefix}{}", rng.gen_range(0..size)));
    }
}

fn share(total: usize, frac: f64) -> usize {
    (total as f64 * frac).round() as usize
}

/// Id, timestamp and tags of a generated question.
type Question = (PostId, DateTime<Utc>, Vec<String>);

pub fn generate_synthetic(spec: &SynthSpec) -> Result<Synthetic> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let s = spec.num_skills;
    let a = spec.answers_per_user;
    let base = Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).single().expect("valid date");

    let mut ids: Vec<i64> = (1..=spec.num_users() as i64).collect();
    ids.shuffle(&mut rng);
    let mut ids = ids.into_iter().map(UserId);

    let mut truth = Vec::with_capacity(spec.num_users());
    let mut events = Vec::new();
    let push = |events: &mut Vec<Event>, user, skill, count, rate| {
        events.extend((0..count).map(|_| Event { user, skill, rate }));
    };
    for i in 0..spec.num_t_shaped {
        let user = ids.next().expect("enough ids");
        let main = i % s;
        let secondary = (main + 1 + (i / s) % (s - 1)) % s;
        push(&mut events, user, main, a, spec.rates.high);
        push(
            &mut events,
            user,
            secondary,
            share(a, spec.secondary_share),
            spec.rates.moderate,
        );
        for k in (0..s).filter(|&k| k != main && k != secondary) {
            push(&mut events, user, k, share(a, spec.other_share), spec.rates.low);
        }
        truth.push(TruthRow {
            user,
            shape: ExpertiseShape::TShaped,
            skills: vec![main],
        });
    }
    for i in 0..spec.num_c_shaped {
        let user = ids.next().expect("enough ids");
        let first = i % s;
        let second = (first + 1 + (i / s) % (s - 1)) % s;
        for k in 0..s {
            if k == first || k == second {
                push(&mut events, user, k, share(a, spec.c_share), spec.rates.high);
            } else {
                push(&mut events, user, k, share(a, spec.other_share), spec.rates.low);
            }
        }
        let mut skills = vec![first, second];
        skills.sort_unstable();
        truth.push(TruthRow {
            user,
            shape: ExpertiseShape::CShaped,
            skills,
        });
    }
    let ne_answers = share(a, spec.non_expert_share);
    for i in 0..spec.num_non_expert {
        let user = ids.next().expect("enough ids");
        let focus = i % s;
        let spread = ne_answers >= s;
        for k in 0..s {
            let count = match (k == focus, spread) {
                (true, true) => ne_answers - (s - 1),
                (true, false) => ne_answers,
                (false, true) => 1,
                (false, false) => 0,
            };
            push(&mut events, user, k, count, spec.rates.low);
        }
        truth.push(TruthRow {
            user,
            shape: ExpertiseShape::NonExpert,
            skills: Vec::new(),
        });
    }
    truth.sort_by_key(|t| t.user);
    let users: Vec<UserId> = truth.iter().map(|t| t.user).collect();

    // Questions.
    let mut posts = Vec::new();
    let mut next_id = 1i64;
    let mut questions: Vec<Vec<Question>> = vec![Vec::new(); s];
    for (k, qs) in questions.iter_mut().enumerate() {
        for _ in 0..spec.questions_per_skill {
            let n_tags = rng.gen_range(1..=spec.tags_per_skill.min(3));
            let mut tag_idx: Vec<usize> = (0..spec.tags_per_skill).collect();
            tag_idx.shuffle(&mut rng);
            let tags: Vec<String> = tag_idx[..n_tags].iter().map(|&j| spec.tag(k, j)).collect();
            let created = base + Duration::seconds(rng.gen_range(0..365 * 24 * 3600));
            let owner = users.choose(&mut rng).copied();
            let mut body = Vec::new();
            words(&mut rng, &format!("s{k}b"), spec.vocab_per_skill, 8, &mut body);
            words(&mut rng, "g", spec.generic_vocab, 4, &mut body);
            body.push(tags[0].clone());
            let id = PostId(next_id);
            next_id += 1;
            posts.push(Post::question(
                id,
                owner,
                tags.clone(),
                format!("<p>{}</p>", body.join(" ")),
                created,
            ));
            qs.push((id, created, tags));
        }
    }

    // Answers, in shuffled order so acceptance collisions are fair.
    events.shuffle(&mut rng);
    let mut taken: Vec<Vec<bool>> = vec![vec![false; spec.questions_per_skill]; s];
    let w = spec.words_per_answer;
    let n_expert = share(w, spec.expert_word_share);
    for ev in events {
        let qi = rng.gen_range(0..spec.questions_per_skill);
        let (qid, qtime, ref qtags) = questions[ev.skill][qi];
        let accepted = rng.gen_bool(ev.rate) && !taken[ev.skill][qi];
        if accepted {
            taken[ev.skill][qi] = true;
        }
        let mut body = Vec::with_capacity(w + 1);
        let (expert, rest) = if accepted { (n_expert, w - n_expert) } else { (0, w) };
        words(
            &mut rng,
            &format!("s{}x", ev.skill),
            spec.vocab_per_skill,
            expert,
            &mut body,
        );
        let basic = rest - rest * 2 / 5;
        words(
            &mut rng,
            &format!("s{}b", ev.skill),
            spec.vocab_per_skill,
            basic,
            &mut body,
        );
        words(&mut rng, "g", spec.generic_vocab, rest - basic, &mut body);
        body.shuffle(&mut rng);
        body.push(qtags.choose(&mut rng).expect("questions have tags").clone());
        let created = qtime + Duration::seconds(rng.gen_range(60..30 * 24 * 3600));
        posts.push(Post::answer(
            PostId(next_id),
            qid,
            Some(ev.user),
            format!("<p>{}</p>", body.join(" ")),
            created,
            accepted,
        ));
        next_id += 1;
    }

    Ok(Synthetic { posts, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn same_seed_same_bytes() {
        let spec = SynthSpec {
            num_non_expert: 20,
            questions_per_skill: 50,
            ..Default::default()
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.jsonl().unwrap(), b.jsonl().unwrap());
        assert_eq!(a.truth_csv(), b.truth_csv());
        let c = generate_synthetic(&SynthSpec { seed: 7, ..spec }).unwrap();
        assert_ne!(a.jsonl().unwrap(), c.jsonl().unwrap());
    }

    #[test]
    fn zero_users_gives_questions_only() {
        let spec = SynthSpec {
            num_t_shaped: 0,
            num_c_shaped: 0,
            num_non_expert: 0,
            questions_per_skill: 10,
            ..Default::default()
        };
        let syn = generate_synthetic(&spec).unwrap();
        assert_eq!(syn.posts.len(), 30);
        let corpus = syn.corpus().unwrap();
        assert_eq!(corpus.num_answers(), 0);
        assert!(syn.truth.is_empty());
    }

    #[test]
    fn maxima_enforced() {
        let spec = SynthSpec {
            num_non_expert: MAX_USERS,
            ..Default::default()
        };
        assert!(generate_synthetic(&spec).unwrap_err().to_string().contains("maximum"));
        assert!(generate_synthetic(&SynthSpec {
            num_skills: 1,
            ..Default::default()
        })
        .is_err());
        let bad_rate = SynthSpec {
            rates: RateProfile {
                high: 1.5,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(generate_synthetic(&bad_rate).is_err());
    }

    #[test]
    fn one_accepted_answer_per_question() {
        let syn = generate_synthetic(&SynthSpec::default()).unwrap();
        let mut seen = BTreeSet::new();
        for p in syn.posts.iter().filter(|p| p.accepted) {
            assert!(seen.insert(p.parent_id));
        }
        assert_eq!(syn.truth.len(), 200);
    }
}
