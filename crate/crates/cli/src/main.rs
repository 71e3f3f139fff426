use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tshape_core::pipeline::{
    generate_synthetic, sensitivity_sweep, write_sweep, Pipeline, PipelineConfig, StageOutcome, SweepParameter,
    SynthSpec, SYNTHETIC_PRESET,
};
use tshape_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_STAGE: u8 = 3;

/// Expertise-shape mining and T-shaped expert ranking over CQA posts.
#[derive(Debug, Parser)]
#[command(name = "tshape", version)]
struct Cli {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true, default_value = "config.json")]
    config: PathBuf,

    /// Sets every module seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides one config value, e.g. `--set model.n=50`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_key_value)]
    overrides: Vec<(String, String)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and index the corpus.
    Ingest,
    /// Extract skill areas from tag co-occurrence.
    Skills,
    /// Score users per skill, classify shapes and build the golden set.
    Label,
    /// Fit the topic model and embed every answer.
    Embed,
    /// Train the dual CNN.
    Train,
    /// Rank candidates per skill with the CNN and the DBA baseline.
    Rank,
    /// Compute metric tables and t-tests.
    Eval,
    /// Copy the final artifacts to the output directory.
    Report,
    /// Run every stage.
    Run,
    /// Retrain or re-evaluate for each value of `n` or `R`.
    Sweep {
        /// `n` or `R`.
        #[arg(long)]
        param: SweepParameter,
        /// Comma-separated positive values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        /// Output directory; defaults to `<output_dir>/sweep`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus with planted expertise shapes.
    Synth {
        /// Target directory for corpus.jsonl, truth.csv and config.json.
        #[arg(long)]
        out: PathBuf,
        /// SynthSpec as JSON; missing fields take their defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    if k.is_empty() {
        return Err(format!("empty key in `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Stage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Stage(other.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let cfg = PipelineConfig::load(&cli.config, &cli.overrides)?;
    Ok(match cli.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    })
}

fn print_outcomes(outcomes: &[StageOutcome]) {
    for o in outcomes {
        println!("{:<8} {}", o.stage, o.status);
    }
}

fn synth(out: &Path, spec: Option<&Path>, seed: Option<u64>) -> Result<(), Failure> {
    let mut spec: SynthSpec = match spec {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("invalid spec {}: {e}", p.display())))?
        }
        None => SynthSpec::default(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let synthetic = generate_synthetic(&spec).map_err(|e| Failure::Config(e.to_string()))?;
    let (corpus, truth) = synthetic.write(out)?;
    let config = out.join("config.json");
    fs::write(&config, SYNTHETIC_PRESET)
        .map_err(|e| Failure::Stage(format!("cannot write {}: {e}", config.display())))?;
    for p in [corpus, truth, config] {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let stage = match &cli.command {
        Command::Synth { out, spec } => return synth(out, spec.as_deref(), cli.seed),
        Command::Sweep { param, values, out } => {
            let cfg = load_config(cli)?;
            let dir = out.clone().unwrap_or_else(|| cfg.paths.output_dir.join("sweep"));
            let mut pipeline = Pipeline::open(cfg)?;
            let result = sensitivity_sweep(&mut pipeline, *param, values);
            print_outcomes(pipeline.outcomes());
            for p in write_sweep(&result?, &dir)? {
                println!("wrote {}", p.display());
            }
            return Ok(());
        }
        Command::Ingest => "ingest",
        Command::Skills => "skills",
        Command::Label => "label",
        Command::Embed => "embed",
        Command::Train => "train",
        Command::Rank => "rank",
        Command::Eval => "eval",
        Command::Report | Command::Run => "report",
    };
    let mut pipeline = Pipeline::open(load_config(cli)?)?;
    let result = pipeline.run_until(stage);
    print_outcomes(pipeline.outcomes());
    result?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Stage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}
