use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::embedding::LdaConfig;
use crate::error::{Error, Result};
use crate::labels::RankingMode;
use crate::nn::{ModelConfig, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    /// Posts as JSONL (`.jsonl`) or a dump `Posts.xml` (`.xml`).
    pub corpus: PathBuf,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            corpus: PathBuf::from("corpus.jsonl"),
            cache_dir: PathBuf::from("cache"),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkillSettings {
    /// Most frequent tags considered for clustering.
    pub tag_limit: usize,
    pub cluster_threshold: f64,
    pub overrides: Option<PathBuf>,
}

impl Default for SkillSettings {
    fn default() -> Self {
        SkillSettings {
            tag_limit: 200,
            cluster_threshold: 0.2,
            overrides: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoldenSettings {
    pub negative_ratio: f64,
    pub seed: u64,
}

impl Default for GoldenSettings {
    fn default() -> Self {
        GoldenSettings {
            negative_ratio: 2.0,
            seed: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSettings {
    pub cutoffs: Vec<usize>,
    /// Jelinek-Mercer weight of the collection model in the DBA baseline.
    pub lambda: f64,
    /// Lowest grade that counts as a hit for MRR.
    pub mrr_min_grade: u8,
    pub alpha: f64,
    /// Permutations averaged for the random baseline.
    pub random_permutations: usize,
    pub seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            cutoffs: vec![5, 10, 15, 20, 30, 50, 100],
            lambda: 0.5,
            mrr_min_grade: 2,
            alpha: 0.05,
            random_permutations: 100,
            seed: 5,
        }
    }
}

/// Everything a pipeline run needs. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub mode: RankingMode,
    pub skills: SkillSettings,
    pub golden: GoldenSettings,
    pub embedding: LdaConfig,
    pub model: ModelConfig,
    pub training: TrainConfig,
    pub eval: EvalSettings,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Sets `a.b.c = value` in a JSON tree, creating objects on the way.
/// `value` is parsed as JSON when possible and taken as a string otherwise.
pub fn set_json_path(root: &mut Value, dotted: &str, value: &str) -> Result<()> {
    let parsed = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    let mut node = root;
    let parts: Vec<&str> = dotted.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(format!("bad key `{dotted}`")));
    }
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| config_err(format!("`{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), parsed);
            return Ok(());
        }
        node = obj
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Settings for corpora made by `generate_synthetic`: a small topic model
/// and look-up window, every non-expert pair in the golden set, and the best
/// of four initialisations.
pub const SYNTHETIC_PRESET: &str = include_str!("synthetic.json");

impl PipelineConfig {
    /// `SYNTHETIC_PRESET` with paths relative to `dir`.
    pub fn synthetic(dir: &Path, overrides: &[(String, String)]) -> Result<Self> {
        Self::from_json(SYNTHETIC_PRESET, overrides, dir)
    }

    /// Parses JSON text, applies `key=value` overrides, then validates.
    pub fn from_json(text: &str, overrides: &[(String, String)], base_dir: &Path) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
        if !value.is_object() {
            return Err(config_err("config must be a JSON object"));
        }
        for (k, v) in overrides {
            set_json_path(&mut value, k, v)?;
        }
        let mut cfg: PipelineConfig = serde_json::from_value(value).map_err(|e| config_err(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, overrides, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.paths.corpus);
        fix(&mut self.paths.cache_dir);
        fix(&mut self.paths.output_dir);
        if let Some(o) = self.skills.overrides.as_mut() {
            fix(o);
        }
    }

    /// Every module seed set to `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.golden.seed = seed;
        self.embedding.seed = seed;
        self.model.seed = seed;
        self.training.seed = seed;
        self.eval.seed = seed;
        self
    }

    /// Range checks, then existence of every input path.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| config_err(e.to_string());
        self.validate_settings()?;
        self.model.validate().map_err(wrap)?;
        self.training.validate().map_err(wrap)?;
        self.embedding.validate().map_err(wrap)?;
        if self.model.m_d != self.embedding.num_topics {
            return Err(config_err(format!(
                "model.m_d ({}) must equal embedding.num_topics ({})",
                self.model.m_d, self.embedding.num_topics
            )));
        }
        if !self.paths.corpus.is_file() {
            return Err(config_err(format!(
                "corpus file not found: {}",
                self.paths.corpus.display()
            )));
        }
        if let Some(o) = &self.skills.overrides {
            if !o.is_file() {
                return Err(config_err(format!("override file not found: {}", o.display())));
            }
        }
        Ok(())
    }

    fn validate_settings(&self) -> Result<()> {
        if self.skills.tag_limit < 1 {
            return Err(config_err("skills.tag_limit must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.skills.cluster_threshold) {
            return Err(config_err("skills.cluster_threshold must lie in [0, 1]"));
        }
        if !(self.golden.negative_ratio >= 0.0) {
            return Err(config_err("golden.negative_ratio must be >= 0"));
        }
        let e = &self.eval;
        if e.cutoffs.is_empty() || e.cutoffs.contains(&0) {
            return Err(config_err("eval.cutoffs must be a nonempty list of positive integers"));
        }
        if !(0.0..=1.0).contains(&e.lambda) {
            return Err(config_err("eval.lambda must lie in [0, 1]"));
        }
        if e.mrr_min_grade > 2 {
            return Err(config_err("eval.mrr_min_grade must be 0, 1 or 2"));
        }
        if !(e.alpha > 0.0 && e.alpha < 1.0) {
            return Err(config_err("eval.alpha must lie in (0, 1)"));
        }
        if e.random_permutations < 1 {
            return Err(config_err("eval.random_permutations must be >= 1"));
        }
        Ok(())
    }
}
