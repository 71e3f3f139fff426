//! Stage orchestration, configuration, caching and synthetic corpora.

mod cache;
mod config;
mod run;
mod sweep;
mod synth;

pub use cache::CacheLock;
pub use config::{set_json_path, EvalSettings, GoldenSettings, Paths, PipelineConfig, SkillSettings, SYNTHETIC_PRESET};
pub use run::{random_table, Pipeline, StageOutcome, StageStatus, STAGES, SYSTEMS};
pub use sweep::{sensitivity_sweep, write_sweep, SweepParameter, SweepPoint, SweepResult};
pub use synth::{generate_synthetic, RateProfile, SynthSpec, Synthetic, TruthRow};
