use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{MatrixResult, Metric, Pairing, SpeedRegime};
use crate::stats::{compare_all, PairedTest};

/// Seed-level statistics of one summary cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` for a single seed.
    pub sd: Option<f64>,
}

impl CellStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = (n > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        Some(CellStats { n, mean, sd })
    }
}

/// One regime's table: four pairing rows by three metric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub regime: SpeedRegime,
    pub rows: Vec<(Pairing, [Option<CellStats>; 3])>,
}

/// `"mean ± sd"` at one decimal.
pub fn format_mean_sd(stats: &CellStats) -> String {
    match stats.sd {
        Some(sd) => format!("{:.1} ± {:.1}", stats.mean, sd),
        None => format!("{:.1} ± n/a", stats.mean),
    }
}

/// Summary tables for every regime that has at least one run.
pub fn summarize(results: &MatrixResult) -> Vec<SummaryTable> {
    results
        .regimes()
        .into_iter()
        .map(|regime| SummaryTable {
            regime,
            rows: Pairing::ALL
                .iter()
                .map(|&p| {
                    let cell = |m: Metric| {
                        let v: Vec<f64> = results.seed_values(p, regime, m).into_iter().map(|(_, v)| v).collect();
                        CellStats::of(&v)
                    };
                    (p, Metric::ALL.map(cell))
                })
                .collect(),
        })
        .collect()
}

pub fn render_summary(tables: &[SummaryTable]) -> String {
    let mut out = String::new();
    for t in tables {
        let _ = writeln!(out, "{} ({}): final-window mean ± sd over seeds", t.regime.title(), t.regime.name());
        let _ = write!(out, "{:<10}", "Config");
        for m in Metric::ALL {
            let _ = write!(out, " {:>18}", m.title());
        }
        out.push('\n');
        for (p, cells) in &t.rows {
            let _ = write!(out, "{:<10}", p.label());
            for c in cells {
                let text = c.as_ref().map_or_else(|| "-".to_string(), format_mean_sd);
                let _ = write!(out, " {text:>18}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

fn summary_csv(tables: &[SummaryTable]) -> String {
    let mut out = String::from("regime,pairing,metric,n,mean,sd\n");
    for t in tables {
        for (p, cells) in &t.rows {
            for (m, c) in Metric::ALL.iter().zip(cells) {
                let (n, mean, sd) = match c {
                    Some(c) => (c.n.to_string(), c.mean.to_string(), c.sd.map_or(String::new(), |s| s.to_string())),
                    None => ("0".to_string(), String::new(), String::new()),
                };
                let _ = writeln!(out, "{},{},{},{n},{mean},{sd}", t.regime.name(), p.name(), m.name());
            }
        }
    }
    out
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `summary.txt` and `summary.csv` under `dir`; returns the table text.
/// Missing cells render as `-`.
pub fn emit_summary(results: &MatrixResult, dir: &Path) -> Result<String> {
    if results.is_empty() {
        return Err(Error::Incomplete("every run".into()));
    }
    let tables = summarize(results);
    let text = render_summary(&tables);
    write(dir, "summary.txt", &text)?;
    write(dir, "summary.csv", &summary_csv(&tables))?;
    Ok(text)
}

/// Fails with every missing `(pairing, regime, seed)` of the regimes present.
fn require_complete(results: &MatrixResult) -> Result<()> {
    if results.is_empty() {
        return Err(Error::Incomplete("every run".into()));
    }
    let mut missing = Vec::new();
    for regime in results.regimes() {
        let mut seeds: Vec<u64> = results.runs.keys().filter(|k| k.1 == regime).map(|k| k.2).collect();
        seeds.sort_unstable();
        seeds.dedup();
        for p in Pairing::ALL {
            for &s in &seeds {
                if results.get(p, regime, s).is_none() {
                    missing.push(format!("{}/{}/seed{s}", p.name(), regime.name()));
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Incomplete(missing.join(", ")))
    }
}

pub fn render_stats(tests: &[PairedTest]) -> String {
    let mut out = String::new();
    let mut family = None;
    for t in tests {
        if family != Some((t.regime, t.metric)) {
            family = Some((t.regime, t.metric));
            let _ = writeln!(out, "\n{} / {} (Holm over 6 tests, n = {})", t.regime.title(), t.metric.title(), t.n);
            let _ = writeln!(
                out,
                "{:<20} {:>10} {:>10} {:>7} {:>11} {:>6}",
                "comparison", "p_raw", "p_holm", "delta", "magnitude", "reject"
            );
        }
        let pair = format!("{} vs {}", t.config_a.label(), t.config_b.label());
        let _ = writeln!(
            out,
            "{pair:<20} {:>10.5} {:>10.5} {:>7.3} {:>11} {:>6}",
            t.p_raw,
            t.p_adjusted,
            t.delta,
            t.magnitude.label(),
            if t.reject_at_005 { "yes" } else { "no" }
        );
    }
    out.trim_start().to_string()
}

fn stats_csv(tests: &[PairedTest]) -> String {
    let mut out = String::from("regime,metric,config_a,config_b,n,p_raw,p_adjusted,delta,magnitude,reject_at_005,degenerate\n");
    for t in tests {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t.regime.name(),
            t.metric.name(),
            t.config_a.name(),
            t.config_b.name(),
            t.n,
            t.p_raw,
            t.p_adjusted,
            t.delta,
            t.magnitude.label(),
            t.reject_at_005,
            t.degenerate
        );
    }
    out
}

/// Runs every regime x metric family present in `results` and writes
/// `stats.txt` and `stats.csv` under `dir`. Nothing is written unless the
/// matrix is complete for each regime present.
pub fn emit_stats_report(results: &MatrixResult, dir: &Path) -> Result<(String, Vec<PairedTest>)> {
    require_complete(results)?;
    let tests = compare_all(results, &results.regimes())?;
    let text = render_stats(&tests);
    write(dir, "stats.txt", &text)?;
    write(dir, "stats.csv", &stats_csv(&tests))?;
    Ok((text, tests))
}

/// Curve rows for one regime and metric: pairing columns present in
/// `results`, and for each `k < n / stride` the row at episode
/// `(k + 1) * stride` holding the cross-seed mean of trailing rolling means.
pub fn curve_rows(
    results: &MatrixResult,
    regime: SpeedRegime,
    metric: Metric,
    stride: usize,
    window: usize,
) -> (Vec<Pairing>, Vec<(usize, Vec<f64>)>) {
    let stride = stride.max(1);
    let window = window.max(1);
    let columns: Vec<Pairing> = Pairing::ALL
        .into_iter()
        .filter(|&p| !results.cell(p, regime).is_empty())
        .collect();
    let series: Vec<Vec<Vec<f64>>> = columns
        .iter()
        .map(|&p| results.cell(p, regime).iter().map(|r| r.series(metric)).collect())
        .collect();
    let n = series.iter().flatten().map(Vec::len).min().unwrap_or(0);
    let rows = (0..n / stride)
        .map(|k| {
            let end = (k + 1) * stride;
            let start = end.saturating_sub(window);
            let cells = series
                .iter()
                .map(|seeds| {
                    let rolling = |s: &Vec<f64>| s[start..end].iter().sum::<f64>() / (end - start) as f64;
                    seeds.iter().map(rolling).sum::<f64>() / seeds.len() as f64
                })
                .collect();
            (end, cells)
        })
        .collect();
    (columns, rows)
}

/// Writes `curves_<regime>_<metric>.csv` for every regime present.
pub fn emit_curves(results: &MatrixResult, stride: usize, window: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::Incomplete("every run".into()));
    }
    let mut written = Vec::new();
    for regime in results.regimes() {
        for metric in Metric::ALL {
            let (columns, rows) = curve_rows(results, regime, metric, stride, window);
            let mut body = String::from("episode");
            for p in &columns {
                body.push(',');
                body.push_str(p.name());
            }
            body.push('\n');
            for (episode, cells) in rows {
                let _ = write!(body, "{episode}");
                for c in cells {
                    let _ = write!(body, ",{c}");
                }
                body.push('\n');
            }
            written.push(write(dir, &format!("curves_{}_{}.csv", regime.name(), metric.name()), &body)?);
        }
    }
    Ok(written)
}
