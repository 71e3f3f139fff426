use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::Pipeline;
use crate::error::{Error, Result};
use crate::eval::{line_chart_svg, Metric, MetricTable, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Documents per side; retrains for every value.
    N,
    /// Ranking cutoff; reuses the cached rankings.
    R,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::N => "n",
            SweepParameter::R => "R",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParameter::N),
            "R" | "r" => Ok(SweepParameter::R),
            other => Err(Error::invalid(format!(
                "unknown sweep parameter `{other}` (expected n or R)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: usize,
    pub tables: Vec<MetricTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn macro_avg(&self, system: &str, metric: Metric, value: usize, r: usize) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.value == value)?
            .tables
            .iter()
            .find(|t| t.system == system)?
            .macro_avg(metric, r)
    }

    /// `parameter,value,system,metric,R,score` over macro averages.
    pub fn csv(&self) -> String {
        let mut out = String::from("parameter,value,system,metric,R,score\n");
        for p in &self.points {
            for t in &p.tables {
                for m in Metric::ALL {
                    for r in t.cutoffs() {
                        if let Some(v) = t.macro_avg(m, r) {
                            let _ = writeln!(
                                out,
                                "{},{},{},{},{r},{v}",
                                self.parameter.as_str(),
                                p.value,
                                t.system,
                                m.as_str()
                            );
                        }
                    }
                }
            }
        }
        out
    }

    fn series(&self, metric: Metric) -> Vec<Series> {
        let mut out: Vec<Series> = Vec::new();
        for p in &self.points {
            for t in &p.tables {
                for r in t.cutoffs() {
                    let name = match self.parameter {
                        SweepParameter::N => format!("{}@{r}", t.system),
                        SweepParameter::R => t.system.clone(),
                    };
                    let Some(v) = t.macro_avg(metric, r) else { continue };
                    match out.iter_mut().find(|s| s.name == name) {
                        Some(s) => s.points.push((p.value as f64, v)),
                        None => out.push(Series {
                            name,
                            points: vec![(p.value as f64, v)],
                        }),
                    }
                }
            }
        }
        out
    }
}

/// Re-evaluates the pipeline for each value of `parameter`. Sweeping `n`
/// below the filter height lowers `f` to `n` for that point.
pub fn sensitivity_sweep(pipeline: &mut Pipeline, parameter: SweepParameter, values: &[usize]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    if values.contains(&0) {
        return Err(Error::invalid("sweep values must be positive"));
    }
    let cutoffs = pipeline.config().eval.cutoffs.clone();
    let mrr_min_grade = pipeline.config().eval.mrr_min_grade;
    let mut points = Vec::with_capacity(values.len());
    match parameter {
        SweepParameter::N => {
            pipeline.run_until("label")?;
            pipeline.run_until("embed")?;
            for &n in values {
                let mut cfg = pipeline.config().model;
                cfg.n = n;
                cfg.f = cfg.f.min(n);
                let (model, _) = pipeline.fit_model(cfg)?;
                let rankings = pipeline.rank_with(&model)?;
                let table = MetricTable::compute::<f64>("dual_cnn", &rankings, &cutoffs, mrr_min_grade)?;
                points.push(SweepPoint {
                    value: n,
                    tables: vec![table],
                });
            }
        }
        SweepParameter::R => {
            pipeline.run_until("rank")?;
            for &r in values {
                points.push(SweepPoint {
                    value: r,
                    tables: pipeline.metric_tables(&[r])?,
                });
            }
        }
    }
    Ok(SweepResult { parameter, points })
}

/// Writes `sweep_<param>.csv` and one `<metric>_vs_<param>.svg` per metric.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let p = result.parameter.as_str();
    let mut written = Vec::new();
    let csv = dir.join(format!("sweep_{p}.csv"));
    fs::write(&csv, result.csv()).map_err(|e| Error::io(&csv, e))?;
    written.push(csv);
    for m in Metric::ALL {
        let name = m.as_str().to_uppercase();
        let svg = line_chart_svg(&format!("{name} vs {p}"), p, &name, &result.series(m));
        let path = dir.join(format!("{}_vs_{p}.svg", m.as_str()));
        fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
