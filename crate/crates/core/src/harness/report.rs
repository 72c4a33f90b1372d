use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::RunMetrics;
use super::svg::{color_for, line_chart, memory_bands, Series};
use crate::error::{Error, Result};
use crate::replay::MemoryKind;

/// Across-seed aggregate of one label at one checkpoint. Standard
/// deviations are population deviations, so a single run has zero spread.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub label: String,
    pub global_step: u64,
    pub runs: usize,
    pub eval_return_mean: f64,
    pub eval_return_std: f64,
    pub q_sum_mean: f64,
    pub q_sum_std: f64,
    /// Fraction of runs that evaluated with episodic control.
    pub ec_fraction: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<AggregateRow>,
}

impl SweepSummary {
    pub fn get(&self, label: &str, global_step: u64) -> Option<&AggregateRow> {
        self.rows
            .iter()
            .find(|r| r.label == label && r.global_step == global_step)
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !labels.contains(&r.label.as_str()) {
                labels.push(&r.label);
            }
        }
        labels
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        for r in &self.rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let rows = r
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_err)?;
        Ok(Self { rows })
    }
}

/// A loaded run: its label, where it came from, and its metrics.
#[derive(Clone, Debug)]
pub struct LabelledRun {
    pub label: String,
    pub name: String,
    pub path: PathBuf,
    pub metrics: RunMetrics,
}

/// Label of a metrics file: its stem without the `_seed<N>` suffix.
pub fn label_of(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.rfind("_seed") {
        Some(i) if stem[i + 5..].chars().all(|c| c.is_ascii_digit()) && i + 5 < stem.len() => {
            stem[..i].to_string()
        }
        _ => stem,
    }
}

pub fn load_runs(paths: &[PathBuf]) -> Result<Vec<LabelledRun>> {
    paths
        .iter()
        .map(|p| {
            Ok(LabelledRun {
                label: label_of(p),
                name: p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                path: p.clone(),
                metrics: RunMetrics::load(p)?,
            })
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates eval rows per label and checkpoint. Every run must share the
/// first run's checkpoint grid.
pub fn summarize(runs: &[LabelledRun]) -> Result<SweepSummary> {
    let Some(first) = runs.first() else {
        return Err(Error::Config("no metrics files to summarize".into()));
    };
    let grid = first.metrics.checkpoints();
    let offending: Vec<PathBuf> = runs
        .iter()
        .filter(|r| r.metrics.checkpoints() != grid)
        .map(|r| r.path.clone())
        .collect();
    if !offending.is_empty() {
        return Err(Error::GridMismatch(offending));
    }

    let mut labels: Vec<&str> = Vec::new();
    for r in runs {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }
    let mut rows = Vec::new();
    for label in labels {
        let group: Vec<Vec<_>> = runs
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.metrics.evals().collect())
            .collect();
        for (i, &step) in grid.iter().enumerate() {
            let returns: Vec<f64> = group
                .iter()
                .map(|evals| evals[i].episode_return.unwrap_or(f64::NAN))
                .collect();
            let q_sums: Vec<f64> = group.iter().map(|evals| evals[i].q_sum_rl).collect();
            let ec = group
                .iter()
                .filter(|evals| evals[i].memory_used == Some(MemoryKind::Ec))
                .count();
            let (eval_return_mean, eval_return_std) = mean_std(&returns);
            let (q_sum_mean, q_sum_std) = mean_std(&q_sums);
            rows.push(AggregateRow {
                label: label.to_string(),
                global_step: step,
                runs: group.len(),
                eval_return_mean,
                eval_return_std,
                q_sum_mean,
                q_sum_std,
                ec_fraction: ec as f64 / group.len() as f64,
            });
        }
    }
    Ok(SweepSummary { rows })
}

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const RETURNS_PLOT: &str = "eval_returns.svg";
pub const Q_SUM_PLOT: &str = "q_sum.svg";
pub const BANDS_PLOT: &str = "memory_bands.svg";

/// Writes the aggregate CSV and the three plots into `out_dir`.
pub fn report(paths: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if paths.is_empty() {
        return Err(Error::Config(
            "report needs at least one metrics CSV".into(),
        ));
    }
    let runs = load_runs(paths)?;
    let summary = summarize(&runs)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let aggregate = out_dir.join(AGGREGATE_FILE);
    summary.save(&aggregate)?;

    let curves = |value: fn(&AggregateRow) -> (f64, f64)| -> Vec<(String, Vec<(f64, f64, f64)>)> {
        summary
            .labels()
            .into_iter()
            .map(|label| {
                let points = summary
                    .rows
                    .iter()
                    .filter(|r| r.label == label)
                    .map(|r| {
                        let (m, s) = value(r);
                        (r.global_step as f64, m, s)
                    })
                    .collect();
                (label.to_string(), points)
            })
            .collect()
    };
    let render = |title: &str, y_label: &str, data: Vec<(String, Vec<(f64, f64, f64)>)>| {
        let series: Vec<Series> = data
            .iter()
            .enumerate()
            .map(|(i, (label, points))| Series {
                label,
                color: color_for(label, i),
                points: points.clone(),
            })
            .collect();
        line_chart(title, "environment steps", y_label, &series)
    };

    let returns_svg = render(
        "Evaluation return",
        "mean return",
        curves(|r| (r.eval_return_mean, r.eval_return_std)),
    );
    let q_svg = render(
        "Q-table sum over all state-action pairs",
        "sum of Q",
        curves(|r| (r.q_sum_mean, r.q_sum_std)),
    );
    let bands: Vec<(String, Vec<(u64, Option<MemoryKind>)>)> = runs
        .iter()
        .map(|r| {
            (
                r.name.clone(),
                r.metrics
                    .evals()
                    .map(|e| (e.global_step, e.memory_used))
                    .collect(),
            )
        })
        .collect();
    let bands_svg = memory_bands("Memory used for evaluation", &bands);

    let mut written = vec![aggregate];
    for (name, body) in [
        (RETURNS_PLOT, returns_svg),
        (Q_SUM_PLOT, q_svg),
        (BANDS_PLOT, bands_svg),
    ] {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
