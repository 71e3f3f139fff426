use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::stats::{paired_t_test, TTestResult};
use super::Ranking;
use crate::error::{Error, Result};
use crate::labels::csv_field;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Ndcg,
    Err,
    Mrr,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ndcg, Metric::Err, Metric::Mrr];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Ndcg => "ndcg",
            Metric::Err => "err",
            Metric::Mrr => "mrr",
        }
    }
}

/// Per-query metric values of one system at each cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub system: String,
    pub values: BTreeMap<(Metric, usize, String), f64>,
}

impl MetricTable {
    pub fn compute<T: Real>(
        system: impl Into<String>,
        rankings: &[Ranking],
        cutoffs: &[usize],
        mrr_min_grade: u8,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for rk in rankings {
            for &r in cutoffs {
                let q = rk.query.clone();
                values.insert((Metric::Ndcg, r, q.clone()), rk.ndcg::<T>(r)?.to_f64_lossy());
                values.insert((Metric::Err, r, q.clone()), rk.err::<T>(r)?.to_f64_lossy());
                values.insert(
                    (Metric::Mrr, r, q),
                    rk.reciprocal_rank::<T>(r, mrr_min_grade)?.to_f64_lossy(),
                );
            }
        }
        Ok(MetricTable {
            system: system.into(),
            values,
        })
    }

    /// Element-wise mean of tables over the same keys.
    pub fn mean(system: impl Into<String>, tables: &[MetricTable]) -> Result<Self> {
        let Some(first) = tables.first() else {
            return Err(Error::invalid("cannot average zero tables"));
        };
        let mut values = BTreeMap::new();
        for key in first.values.keys() {
            let mut sum = 0.0;
            for t in tables {
                sum += t
                    .values
                    .get(key)
                    .ok_or_else(|| Error::invalid("tables cover different queries or cutoffs"))?;
            }
            values.insert(key.clone(), sum / tables.len() as f64);
        }
        Ok(MetricTable {
            system: system.into(),
            values,
        })
    }

    pub fn cutoffs(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.values.keys().map(|k| k.1).collect();
        set.into_iter().collect()
    }

    pub fn queries(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.values.keys().map(|k| &k.2).collect();
        set.into_iter().cloned().collect()
    }

    /// Values ordered by query name.
    pub fn per_query(&self, metric: Metric, r: usize) -> Vec<f64> {
        self.values
            .iter()
            .filter(|((m, c, _), _)| *m == metric && *c == r)
            .map(|(_, &v)| v)
            .collect()
    }

    /// Mean over queries; `None` when the cutoff was not computed.
    pub fn macro_avg(&self, metric: Metric, r: usize) -> Option<f64> {
        let v = self.per_query(metric, r);
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// `system,metric,R,query,value` with one `ALL` row per (metric, R).
pub fn metrics_csv(tables: &[MetricTable]) -> String {
    let mut out = String::from("system,metric,R,query,value\n");
    for t in tables {
        let sys = csv_field(&t.system);
        for m in Metric::ALL {
            for r in t.cutoffs() {
                for ((_, _, q), v) in t.values.iter().filter(|((mm, c, _), _)| *mm == m && *c == r) {
                    let _ = writeln!(out, "{sys},{},{r},{},{v}", m.as_str(), csv_field(q));
                }
                if let Some(avg) = t.macro_avg(m, r) {
                    let _ = writeln!(out, "{sys},{},{r},ALL,{avg}", m.as_str());
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestRow {
    pub metric: Metric,
    pub r: usize,
    pub system_a: String,
    pub system_b: String,
    pub result: TTestResult,
}

/// Paired t-tests over queries for every system pair, metric and cutoff.
/// Fewer than two shared queries gives a degenerate row.
pub fn compare_systems(tables: &[MetricTable], alpha: f64) -> Result<Vec<TTestRow>> {
    let mut rows = Vec::new();
    for (i, a) in tables.iter().enumerate() {
        for b in &tables[i + 1..] {
            if a.queries() != b.queries() {
                return Err(Error::invalid(format!(
                    "systems {} and {} were evaluated on different queries",
                    a.system, b.system
                )));
            }
            for m in Metric::ALL {
                for r in a.cutoffs() {
                    let xa = a.per_query(m, r);
                    let xb = b.per_query(m, r);
                    let result = if xa.len() < 2 || xa.len() != xb.len() {
                        TTestResult {
                            t_statistic: f64::NAN,
                            degrees_of_freedom: 0,
                            p_value: 1.0,
                            significant: false,
                            degenerate: true,
                        }
                    } else {
                        paired_t_test(&xa, &xb, alpha)?
                    };
                    rows.push(TTestRow {
                        metric: m,
                        r,
                        system_a: a.system.clone(),
                        system_b: b.system.clone(),
                        result,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// `metric,R,system_a,system_b,t,df,p,significant`
pub fn ttests_csv(rows: &[TTestRow]) -> String {
    let mut out = String::from("metric,R,system_a,system_b,t,df,p,significant\n");
    for row in rows {
        let res = &row.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.metric.as_str(),
            row.r,
            csv_field(&row.system_a),
            csv_field(&row.system_b),
            res.t_statistic,
            res.degrees_of_freedom,
            res.p_value,
            res.significant
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A small standalone SVG line chart; the y axis spans `[0, 1]`.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 150.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (xmin, xmax) = if xs.is_empty() {
        (0.0, 1.0)
    } else if xmin == xmax {
        (xmin - 1.0, xmax + 1.0)
    } else {
        (xmin, xmax)
    };
    let sx = |x: f64| left + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| top + (1.0 - y.clamp(0.0, 1.0)) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + ph,
        left + pw,
        top + ph,
        top + ph
    );
    for i in 0..=4 {
        let y = f64::from(i) / 4.0;
        let _ = writeln!(
            out,
            r##"<line x1="{left}" y1="{0}" x2="{1}" y2="{0}" stroke="#ddd"/><text x="{2}" y="{3}" text-anchor="end">{y:.2}</text>"##,
            sy(y),
            left + pw,
            left - 6.0,
            sy(y) + 4.0
        );
    }
    let ticks: BTreeSet<u64> = xs.iter().map(|x| x.to_bits()).collect();
    for bits in ticks {
        let x = f64::from_bits(bits);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#,
            sx(x),
            top + ph + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 12.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        top + ph / 2.0,
        esc(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = top + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="4" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            left + pw + 14.0,
            ly - 4.0,
            left + pw + 30.0,
            ly,
            esc(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `metrics.csv`, `ttests.csv` and one `<metric>_vs_R.svg` chart of
/// macro averages per system. Returns the paths written.
pub fn emit_report(tables: &[MetricTable], tests: &[TTestRow], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    write(dir.join("metrics.csv"), &metrics_csv(tables), &mut written)?;
    write(dir.join("ttests.csv"), &ttests_csv(tests), &mut written)?;
    if tables.is_empty() {
        return Ok(written);
    }
    for m in Metric::ALL {
        let series: Vec<Series> = tables
            .iter()
            .map(|t| Series {
                name: t.system.clone(),
                points: t
                    .cutoffs()
                    .into_iter()
                    .filter_map(|r| t.macro_avg(m, r).map(|v| (r as f64, v)))
                    .collect(),
            })
            .collect();
        let name = m.as_str().to_uppercase();
        let svg = line_chart_svg(&format!("{name}@R"), "R", &name, &series);
        write(dir.join(format!("{}_vs_R.svg", m.as_str())), &svg, &mut written)?;
    }
    Ok(written)
}
