//! Report structure and its markdown, CSV, JSON and plot-data renderings.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::metrics::{Method, MethodSummary, Metric, TrialMetrics};

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTrial {
    pub srs: Vec<TrialMetrics>,
    pub kfcv: Vec<TrialMetrics>,
    pub fsv: Vec<TrialMetrics>,
    /// Unscaled per-iteration loss `L_t` of the FSV runs.
    pub fsv_loss: Vec<f64>,
}

impl PerTrial {
    pub fn get(&self, method: Method) -> &[TrialMetrics] {
        match method {
            Method::Srs => &self.srs,
            Method::Kfcv => &self.kfcv,
            Method::Fsv => &self.fsv,
        }
    }
}

/// Results for one (N, T) cell of the study grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    pub trials: usize,
    /// One summary per method, in SRS, KF, FSV order.
    pub summaries: Vec<MethodSummary>,
    /// Compounded measure `L*` over the cell's T iterations.
    pub fsv_compounded: f64,
    pub per_trial: PerTrial,
}

impl CellReport {
    pub fn summary(&self, method: Method) -> &MethodSummary {
        self.summaries
            .iter()
            .find(|s| s.method == method)
            .expect("every cell holds all three methods")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config_hash: String,
    pub version: String,
    pub wall_time_secs: f64,
}

impl RunMetadata {
    pub fn new(config: &ExperimentConfig, wall_time_secs: f64) -> Self {
        Self {
            config_hash: config_hash(config),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_secs,
        }
    }
}

/// SHA-256 of the canonical JSON form of the configuration.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    format!("{:x}", Sha256::digest(&canonical))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub metadata: RunMetadata,
}

impl ExperimentReport {
    /// Cells for dataset size `n`, in the configured trial order.
    pub fn cells_for(&self, n: usize) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(move |c| c.n == n)
    }

    pub fn cell(&self, n: usize, t: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.n == n && c.trials == t)
    }

    /// Dataset sizes present in the report, in first-seen order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.n) {
                out.push(c.n);
            }
        }
        out
    }
}

/// Shortest decimal form of `v` rounded to 10 significant digits.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let rounded: f64 = format!("{v:.9e}").parse().expect("valid float literal");
    rounded.to_string()
}

/// One table for dataset size `n`: 6 metrics x 3 methods as rows, and
/// mean/min/max for every trial count as columns, 4 decimals.
pub fn emit_markdown_table(report: &ExperimentReport, n: usize) -> Result<String> {
    let cells: Vec<&CellReport> = report.cells_for(n).collect();
    if cells.is_empty() {
        return Err(invalid(format!("no trials recorded for N = {n}")));
    }
    let mut out = String::new();
    let _ = write!(out, "| Statistical Metrics (N = {n}) |");
    for c in &cells {
        let _ = write!(out, " {} Trials Mean | Min | Max |", c.trials);
    }
    out.push_str("\n|---|");
    for _ in &cells {
        out.push_str("---:|---:|---:|");
    }
    out.push('\n');
    for metric in Metric::ALL {
        for method in Method::ALL {
            let _ = write!(out, "| {} {} |", metric.label(), method.label());
            for c in &cells {
                let s = c.summary(method).get(metric);
                let _ = write!(out, " {:.4} | {:.4} | {:.4} |", s.mean, s.min, s.max);
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Every table of the report, separated by blank lines.
pub fn emit_markdown(report: &ExperimentReport) -> Result<String> {
    let tables = report
        .sizes()
        .into_iter()
        .map(|n| emit_markdown_table(report, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(tables.join("\n"))
}

/// Long-format per-trial CSV: `N,T,method,metric,trial,value`.
pub fn write_trials_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "T", "method", "metric", "trial", "value"])?;
    for c in &report.cells {
        for method in Method::ALL {
            for metric in Metric::ALL {
                for (i, tr) in c.per_trial.get(method).iter().enumerate() {
                    w.write_record([
                        c.n.to_string(),
                        c.trials.to_string(),
                        method.label().to_string(),
                        metric.key().to_string(),
                        (i + 1).to_string(),
                        format_sig(tr.get(metric)),
                    ])?;
                }
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Summary CSV: `N,T,method,metric,mean,min,max`.
pub fn write_summary_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "T", "method", "metric", "mean", "min", "max"])?;
    for c in &report.cells {
        for method in Method::ALL {
            let summary = c.summary(method);
            for metric in Metric::ALL {
                let s = summary.get(metric);
                w.write_record([
                    c.n.to_string(),
                    c.trials.to_string(),
                    method.label().to_string(),
                    metric.key().to_string(),
                    format_sig(s.mean),
                    format_sig(s.min),
                    format_sig(s.max),
                ])?;
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-trial series for one cell, one column per (metric, method), plus
/// the running compounded measure of the FSV iterations.
pub fn write_plot_csv<W: Write>(cell: &CellReport, alpha: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["trial".to_string()];
    for metric in Metric::ALL {
        for method in Method::ALL {
            header.push(format!("{}_{}", metric.key(), method.label().to_lowercase()));
        }
    }
    header.push("fsv_lstar_running".into());
    w.write_record(&header)?;
    let mut sum = 0.0;
    for i in 0..cell.trials {
        let mut row = vec![(i + 1).to_string()];
        for metric in Metric::ALL {
            for method in Method::ALL {
                row.push(format_sig(cell.per_trial.get(method)[i].get(metric)));
            }
        }
        sum += cell.per_trial.fsv_loss[i];
        row.push(format_sig(alpha * sum / (i + 1) as f64));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(file))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `trials.csv` and `summary.csv` into `dir`.
pub fn emit_csv(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    let trials = dir.join("trials.csv");
    let summary = dir.join("summary.csv");
    write_trials_csv(report, create(&trials)?).map_err(|e| with_path(e, &trials))?;
    write_summary_csv(report, create(&summary)?).map_err(|e| with_path(e, &summary))?;
    Ok(vec![trials, summary])
}

pub fn emit_json(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json(path: impl AsRef<Path>) -> Result<ExperimentReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// One `plot_N{n}_T{t}.csv` per cell.
pub fn emit_plotdata(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for c in &report.cells {
        let path = dir.join(format!("plot_N{}_T{}.csv", c.n, c.trials));
        write_plot_csv(c, report.config.alpha, create(&path)?).map_err(|e| with_path(e, &path))?;
        written.push(path);
    }
    Ok(written)
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv(inner) if inner.is_io_error() => match inner.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked by is_io_error"),
        },
        other => other,
    }
}
