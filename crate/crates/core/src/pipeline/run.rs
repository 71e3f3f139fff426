use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::cache::{file_digest, hex_digest, CacheLock, Manifest};
use super::PipelineConfig;
use crate::corpus::{ingest_jsonl, ingest_xml, Corpus, PostId, UserId};
use crate::embedding::{
    embed_documents, embeddings_csv, fit_lda, parse_embeddings_csv, save_topic_model, tokenize_answers, DocVector,
};
use crate::error::{Error, Result};
use crate::eval::{
    compare_systems, emit_report, parse_rankings_csv, random_ranking, rank_by_dba, rank_by_model, rankings_csv,
    relevance_for, DbaIndex, MetricTable, Ranking,
};
use crate::labels::{
    apply_skill_overrides, build_golden_set, cluster_tags, label_users, read_overrides, similarity_matrix, top_tags,
    GoldenConfig, GoldenPair, Labels, SkillArea,
};
use crate::nn::{fit, load_model, save_model, ModelConfig, PairDataset, TrainReport};
use crate::Model;

pub const STAGES: [&str; 8] = ["ingest", "skills", "label", "embed", "train", "rank", "eval", "report"];

/// Bumped whenever a stage's artifact format changes.
const CACHE_VERSION: u32 = 1;

/// Systems compared in the report, in output order.
pub const SYSTEMS: [&str; 3] = ["dual_cnn", "dba", "random"];

fn parents(stage: &str) -> &'static [&'static str] {
    match stage {
        "skills" | "embed" => &["ingest"],
        "label" => &["ingest", "skills"],
        "train" => &["skills", "label", "embed"],
        "rank" => &["skills", "label", "embed", "train"],
        "eval" => &["rank"],
        "report" => &["label", "train", "eval"],
        _ => &[],
    }
}

fn ancestors(stage: &'static str, out: &mut BTreeSet<&'static str>) {
    if out.insert(stage) {
        for p in parents(stage) {
            ancestors(p, out);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Computed,
    Cached,
}

impl fmt::Display for StageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageStatus::Computed => "computed",
            StageStatus::Cached => "cached",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub status: StageStatus,
}

/// One pipeline over one cache directory. Stage outputs live in
/// `<cache_dir>/<stage>/` next to a manifest recording the input hash and
/// the digest of every artifact; the report stage writes to the output dir.
pub struct Pipeline {
    cfg: PipelineConfig,
    _lock: CacheLock,
    keys: BTreeMap<&'static str, String>,
    recomputed: BTreeSet<&'static str>,
    outcomes: Vec<StageOutcome>,
    corpus: Option<Corpus>,
    skills: Option<Vec<SkillArea>>,
    labels: Option<Labels>,
    golden: Option<Vec<GoldenPair>>,
    vectors: Option<BTreeMap<PostId, DocVector>>,
    model: Option<Model>,
    rankings: Option<BTreeMap<String, Vec<Ranking>>>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<String> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(name.to_string())
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<String> {
    write_text(dir, name, &serde_json::to_string_pretty(value)?)
}

impl Pipeline {
    pub fn open(cfg: PipelineConfig) -> Result<Pipeline> {
        let lock = CacheLock::acquire(&cfg.paths.cache_dir)?;
        Ok(Pipeline {
            cfg,
            _lock: lock,
            keys: BTreeMap::new(),
            recomputed: BTreeSet::new(),
            outcomes: Vec::new(),
            corpus: None,
            skills: None,
            labels: None,
            golden: None,
            vectors: None,
            model: None,
            rankings: None,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn outcomes(&self) -> &[StageOutcome] {
        &self.outcomes
    }

    pub fn stage_dir(&self, stage: &str) -> PathBuf {
        self.cfg.paths.cache_dir.join(stage)
    }

    fn artifact_dir(&self, stage: &str) -> PathBuf {
        if stage == "report" {
            self.cfg.paths.output_dir.clone()
        } else {
            self.stage_dir(stage)
        }
    }

    /// Runs `target` and every stage it depends on.
    pub fn run_until(&mut self, target: &str) -> Result<Vec<StageOutcome>> {
        let Some(&target) = STAGES.iter().find(|s| **s == target) else {
            return Err(Error::invalid(format!("unknown stage `{target}`")));
        };
        let mut needed = BTreeSet::new();
        ancestors(target, &mut needed);
        let start = self.outcomes.len();
        for stage in STAGES.iter().copied().filter(|s| needed.contains(s)) {
            if !self.keys.contains_key(stage) {
                self.run_stage(stage)?;
            }
        }
        Ok(self.outcomes[start..].to_vec())
    }

    pub fn run_all(&mut self) -> Result<Vec<StageOutcome>> {
        self.run_until("report")
    }

    fn settings(&self, stage: &str) -> Result<Value> {
        let c = &self.cfg;
        Ok(match stage {
            "ingest" => json!({
                "corpus_sha256": file_digest(&c.paths.corpus)?,
                "xml": is_xml(&c.paths.corpus),
            }),
            "skills" => json!({
                "tag_limit": c.skills.tag_limit,
                "cluster_threshold": c.skills.cluster_threshold,
                "overrides_sha256": c.skills.overrides.as_deref().map(file_digest).transpose()?,
            }),
            "label" => json!({ "mode": c.mode, "golden": c.golden }),
            "embed" => json!(c.embedding),
            "train" => json!({ "model": c.model, "training": c.training }),
            "rank" => json!({ "lambda": c.eval.lambda, "mode": c.mode }),
            "eval" => json!(c.eval),
            _ => Value::Null,
        })
    }

    fn stage_key(&self, stage: &str) -> Result<String> {
        let parent_keys: Vec<&String> = parents(stage).iter().map(|p| &self.keys[p]).collect();
        let doc = json!({
            "stage": stage,
            "version": CACHE_VERSION,
            "settings": self.settings(stage)?,
            "parents": parent_keys,
        });
        Ok(hex_digest(serde_json::to_string(&doc)?.as_bytes()))
    }

    fn run_stage(&mut self, stage: &'static str) -> Result<()> {
        let wrap = |e: Error| Error::Stage {
            stage,
            source: Box::new(e),
        };
        let key = self.stage_key(stage).map_err(wrap)?;
        let dir = self.stage_dir(stage);
        let art = self.artifact_dir(stage);
        let manifest_path = dir.join("manifest.json");
        let dirty = parents(stage).iter().any(|p| self.recomputed.contains(p));
        let cached = !dirty && Manifest::read(&manifest_path).is_some_and(|m| m.key == key && m.artifacts_intact(&art));
        let status = if cached {
            StageStatus::Cached
        } else {
            for d in [&dir, &art] {
                fs::create_dir_all(d).map_err(|e| wrap(Error::io(d, e)))?;
            }
            let _ = fs::remove_file(&manifest_path);
            let names = self.compute(stage, &art).map_err(wrap)?;
            Manifest::collect(key.clone(), &art, &names)
                .and_then(|m| m.write(&manifest_path))
                .map_err(wrap)?;
            self.recomputed.insert(stage);
            StageStatus::Computed
        };
        self.keys.insert(stage, key);
        self.outcomes.push(StageOutcome { stage, status });
        Ok(())
    }

    fn compute(&mut self, stage: &str, art: &Path) -> Result<Vec<String>> {
        match stage {
            "ingest" => self.compute_ingest(art),
            "skills" => self.compute_skills(art),
            "label" => self.compute_label(art),
            "embed" => self.compute_embed(art),
            "train" => self.compute_train(art),
            "rank" => self.compute_rank(art),
            "eval" => self.compute_eval(art),
            "report" => self.compute_report(art),
            other => Err(Error::invalid(format!("unknown stage `{other}`"))),
        }
    }

    // ---- lazy loaders for cached stages ----

    pub fn corpus(&mut self) -> Result<&Corpus> {
        if self.corpus.is_none() {
            self.corpus = Some(Corpus::read_cache(&self.stage_dir("ingest").join("corpus.cache"))?);
        }
        Ok(self.corpus.as_ref().expect("loaded"))
    }

    pub fn skills(&mut self) -> Result<&[SkillArea]> {
        if self.skills.is_none() {
            self.skills = Some(read_json(&self.stage_dir("skills").join("skills.json"))?);
        }
        Ok(self.skills.as_deref().expect("loaded"))
    }

    pub fn labels(&mut self) -> Result<&Labels> {
        if self.labels.is_none() {
            self.labels = Some(read_json(&self.stage_dir("label").join("labels.json"))?);
        }
        Ok(self.labels.as_ref().expect("loaded"))
    }

    pub fn golden(&mut self) -> Result<&[GoldenPair]> {
        if self.golden.is_none() {
            self.golden = Some(read_json(&self.stage_dir("label").join("golden.json"))?);
        }
        Ok(self.golden.as_deref().expect("loaded"))
    }

    pub fn vectors(&mut self) -> Result<&BTreeMap<PostId, DocVector>> {
        if self.vectors.is_none() {
            let path = self.stage_dir("embed").join("embeddings.csv");
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            self.vectors = Some(parse_embeddings_csv(&text)?);
        }
        Ok(self.vectors.as_ref().expect("loaded"))
    }

    pub fn model(&mut self) -> Result<&Model> {
        if self.model.is_none() {
            self.model = Some(load_model(&self.stage_dir("train").join("model.cnn"))?);
        }
        Ok(self.model.as_ref().expect("loaded"))
    }

    /// Rankings per system (`dual_cnn`, `dba`).
    pub fn rankings(&mut self) -> Result<&BTreeMap<String, Vec<Ranking>>> {
        if self.rankings.is_none() {
            let mut map = BTreeMap::new();
            for sys in &SYSTEMS[..2] {
                let path = self.stage_dir("rank").join(format!("rankings_{sys}.csv"));
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                map.insert(sys.to_string(), parse_rankings_csv(&text)?);
            }
            self.rankings = Some(map);
        }
        Ok(self.rankings.as_ref().expect("loaded"))
    }

    fn load_inputs(&mut self) -> Result<()> {
        self.corpus()?;
        self.skills()?;
        self.labels()?;
        self.golden()?;
        self.vectors()?;
        Ok(())
    }

    // ---- stages ----

    fn compute_ingest(&mut self, art: &Path) -> Result<Vec<String>> {
        let path = &self.cfg.paths.corpus;
        let ingested = if is_xml(path) {
            ingest_xml(path)?
        } else {
            ingest_jsonl(path)?
        };
        ingested.corpus.write_cache(&art.join("corpus.cache"))?;
        let mut log = format!("skipped {}\n", ingested.skipped);
        for w in &ingested.warnings {
            log.push_str(w);
            log.push('\n');
        }
        let warnings = write_text(art, "warnings.txt", &log)?;
        self.corpus = Some(ingested.corpus);
        Ok(vec!["corpus.cache".into(), warnings])
    }

    fn compute_skills(&mut self, art: &Path) -> Result<Vec<String>> {
        let settings = self.cfg.skills.clone();
        let overrides = match &settings.overrides {
            Some(p) => read_overrides(p)?,
            None => Vec::new(),
        };
        let corpus = self.corpus()?;
        let tags = top_tags(corpus, settings.tag_limit);
        let sim = similarity_matrix(corpus, &tags)?;
        let clusters = cluster_tags(&tags, &sim, settings.cluster_threshold)?;
        let skills = apply_skill_overrides(corpus, &clusters, &overrides)?;
        if skills.is_empty() {
            return Err(Error::InvalidCorpus("no skill areas could be extracted".into()));
        }
        let name = write_json(art, "skills.json", &skills)?;
        self.skills = Some(skills);
        Ok(vec![name])
    }

    fn compute_label(&mut self, art: &Path) -> Result<Vec<String>> {
        self.corpus()?;
        self.skills()?;
        let corpus = self.corpus.as_ref().expect("loaded");
        let skills = self.skills.as_deref().expect("loaded");
        let labels = label_users(corpus, skills);
        let gcfg = GoldenConfig {
            mode: self.cfg.mode,
            negative_ratio: self.cfg.golden.negative_ratio,
            seed: self.cfg.golden.seed,
        };
        let golden = build_golden_set(corpus, skills, &labels, &gcfg)?;
        let names = vec![
            write_json(art, "labels.json", &labels)?,
            write_json(art, "golden.json", &golden)?,
            write_text(art, "scores.csv", &labels.scores_csv())?,
            write_text(art, "shapes.csv", &labels.shapes_csv())?,
        ];
        self.labels = Some(labels);
        self.golden = Some(golden);
        Ok(names)
    }

    fn compute_embed(&mut self, art: &Path) -> Result<Vec<String>> {
        let lda_cfg = self.cfg.embedding;
        let corpus = self.corpus()?;
        let tokens = tokenize_answers(corpus);
        let docs: Vec<&Vec<String>> = tokens.values().collect();
        let model = fit_lda(&docs, lda_cfg)?;
        let vectors = embed_documents(&model, &tokens)?;
        save_topic_model(&model, &art.join("lda.bin"))?;
        let csv = write_text(art, "embeddings.csv", &embeddings_csv(&vectors, lda_cfg.num_topics))?;
        self.vectors = Some(vectors);
        Ok(vec!["lda.bin".into(), csv])
    }

    /// Trains a fresh model under `model_cfg` on the cached golden set.
    pub fn fit_model(&mut self, model_cfg: ModelConfig) -> Result<(Model, TrainReport)> {
        self.load_inputs()?;
        let corpus = self.corpus.as_ref().expect("loaded");
        let data = PairDataset::<f64>::from_golden(
            self.golden.as_deref().expect("loaded"),
            corpus,
            self.skills.as_deref().expect("loaded"),
            self.vectors.as_ref().expect("loaded"),
            model_cfg.n,
            model_cfg.m_d,
        )?;
        fit(&model_cfg, &data, &self.cfg.training)
    }

    fn compute_train(&mut self, art: &Path) -> Result<Vec<String>> {
        let (model, report) = self.fit_model(self.cfg.model)?;
        save_model(&model, &art.join("model.cnn"))?;
        let log = write_text(art, "training_log.csv", &report.log_csv())?;
        let summary = write_json(
            art,
            "train_summary.json",
            &json!({
                "epochs_run": report.history.len(),
                "best_epoch": report.best_epoch,
                "best_val_loss": report.best_val_loss,
                "stopped_early": report.stopped_early,
                "restart": report.restart,
            }),
        )?;
        self.model = Some(model);
        Ok(vec!["model.cnn".into(), log, summary])
    }

    /// Candidates ranked per skill by `model`; every corpus user is a candidate.
    pub fn rank_with(&mut self, model: &Model) -> Result<Vec<Ranking>> {
        self.load_inputs()?;
        let corpus = self.corpus.as_ref().expect("loaded");
        let labels = self.labels.as_ref().expect("loaded");
        let vectors = self.vectors.as_ref().expect("loaded");
        let candidates: Vec<UserId> = corpus.users().iter().copied().collect();
        self.skills
            .as_deref()
            .expect("loaded")
            .iter()
            .map(|s| {
                let rel = relevance_for(labels, self.cfg.mode, &s.name, &candidates);
                rank_by_model(model, s, &candidates, corpus, vectors, rel)
            })
            .collect()
    }

    /// DBA baseline rankings per skill.
    pub fn rank_dba(&mut self) -> Result<Vec<Ranking>> {
        self.load_inputs()?;
        let corpus = self.corpus.as_ref().expect("loaded");
        let labels = self.labels.as_ref().expect("loaded");
        let index = DbaIndex::new(&tokenize_answers(corpus));
        let candidates: Vec<UserId> = corpus.users().iter().copied().collect();
        self.skills
            .as_deref()
            .expect("loaded")
            .iter()
            .map(|s| {
                let rel = relevance_for(labels, self.cfg.mode, &s.name, &candidates);
                rank_by_dba(&index, s, &candidates, corpus, self.cfg.eval.lambda, rel)
            })
            .collect()
    }

    fn compute_rank(&mut self, art: &Path) -> Result<Vec<String>> {
        let model = self.model()?.clone();
        let cnn = self.rank_with(&model)?;
        let dba = self.rank_dba()?;
        let names = vec![
            write_text(art, "rankings_dual_cnn.csv", &rankings_csv(&cnn))?,
            write_text(art, "rankings_dba.csv", &rankings_csv(&dba))?,
        ];
        self.rankings = Some(BTreeMap::from([
            ("dual_cnn".to_string(), cnn),
            ("dba".to_string(), dba),
        ]));
        Ok(names)
    }

    /// Metric tables for every system at `cutoffs`, in [`SYSTEMS`] order.
    pub fn metric_tables(&mut self, cutoffs: &[usize]) -> Result<Vec<MetricTable>> {
        let eval = self.cfg.eval.clone();
        let rankings = self.rankings()?.clone();
        let mut tables = Vec::new();
        for sys in &SYSTEMS[..2] {
            tables.push(MetricTable::compute::<f64>(
                *sys,
                &rankings[*sys],
                cutoffs,
                eval.mrr_min_grade,
            )?);
        }
        tables.push(random_table(&rankings["dual_cnn"], cutoffs, &eval)?);
        Ok(tables)
    }

    fn compute_eval(&mut self, art: &Path) -> Result<Vec<String>> {
        let cutoffs = self.cfg.eval.cutoffs.clone();
        let tables = self.metric_tables(&cutoffs)?;
        let tests = compare_systems(&tables, self.cfg.eval.alpha)?;
        let written = emit_report(&tables, &tests, art)?;
        Ok(written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect())
    }

    fn compute_report(&mut self, art: &Path) -> Result<Vec<String>> {
        let mut names = Vec::new();
        let mut copy = |stage: &str, name: &str| -> Result<()> {
            let from = self.stage_dir(stage).join(name);
            let to = art.join(name);
            fs::copy(&from, &to).map_err(|e| Error::io(&from, e))?;
            names.push(name.to_string());
            Ok(())
        };
        let eval_manifest = Manifest::read(&self.stage_dir("eval").join("manifest.json"))
            .ok_or_else(|| Error::Corrupt("eval manifest missing".into()))?;
        for name in eval_manifest.files.keys() {
            copy("eval", name)?;
        }
        copy("label", "shapes.csv")?;
        copy("label", "scores.csv")?;
        copy("train", "training_log.csv")?;
        copy("rank", "rankings_dual_cnn.csv")?;
        copy("rank", "rankings_dba.csv")?;
        Ok(names)
    }
}

fn is_xml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml"))
}

/// Mean metric table over seeded random permutations of the candidates.
pub fn random_table(
    reference: &[Ranking],
    cutoffs: &[usize],
    eval: &super::config::EvalSettings,
) -> Result<MetricTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(eval.seed);
    let mut tables = Vec::with_capacity(eval.random_permutations);
    for _ in 0..eval.random_permutations {
        let perm = reference
            .iter()
            .map(|r| {
                let mut users: Vec<UserId> = r.entries.iter().map(|e| e.0).collect();
                users.sort_unstable();
                random_ranking(&r.query, &users, r.relevance.clone(), &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(MetricTable::compute::<f64>(
            "random",
            &perm,
            cutoffs,
            eval.mrr_min_grade,
        )?);
    }
    MetricTable::mean("random", &tables)
}
