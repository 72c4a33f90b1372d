use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{summarize, LabelledRun, SweepSummary};
use super::run::run_seed;
use crate::agent::AgentMode;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

pub const SUMMARY_FILE: &str = "summary.csv";

/// The three schedule settings of the ablation grid, as (name, p_start, p_end).
pub const SCHEDULES: [(&str, f64, f64); 3] = [
    ("decayed", 0.9, 0.1),
    ("constant", 0.1, 0.1),
    ("increased", 0.1, 0.9),
];

/// Expands `base` into the ablation grid: data sharing on and off crossed
/// with the three schedules, plus both single-memory baselines. Each variant
/// keeps the base budget, seeds, temperature and output directory.
pub fn ablation_variants(base: &ExperimentConfig) -> Vec<ExperimentConfig> {
    let mut variants = Vec::with_capacity(8);
    for (sharing, tag) in [(true, "ds"), (false, "ods")] {
        for (name, p_start, p_end) in SCHEDULES {
            let mut c = base.clone();
            c.label = format!("2m_{tag}_{name}");
            c.agent.mode = AgentMode::TwoMemory;
            c.agent.data_sharing = sharing;
            c.agent.schedule = Schedule {
                p_start,
                p_end,
                temperature: base.agent.schedule.temperature,
            };
            variants.push(c);
        }
    }
    for mode in [AgentMode::PureEc, AgentMode::PureRl] {
        let mut c = base.clone();
        c.agent.mode = mode;
        c.label = super::config::mode_name(mode).to_string();
        variants.push(c);
    }
    variants
}

/// Runs every variant and seed, writes the per-run CSVs and a cross-variant
/// `summary.csv` into the base output directory, and returns the summary.
pub fn ablation_suite(base: &ExperimentConfig) -> Result<SweepSummary> {
    base.validate()?;
    std::fs::create_dir_all(&base.output_dir).map_err(|e| Error::io(&base.output_dir, e))?;
    let jobs: Vec<(ExperimentConfig, u64)> = ablation_variants(base)
        .into_iter()
        .flat_map(|c| c.seeds.clone().into_iter().map(move |s| (c.clone(), s)))
        .collect();
    let runs: Vec<Result<LabelledRun>> = jobs
        .par_iter()
        .map(|(config, seed)| {
            let metrics = run_seed(config, *seed)?;
            let path = config.csv_path(*seed);
            metrics.save(&path)?;
            Ok(LabelledRun {
                label: config.label.clone(),
                name: format!("{}_seed{seed}", config.label),
                path,
                metrics,
            })
        })
        .collect();
    let runs: Vec<LabelledRun> = runs.into_iter().collect::<Result<_>>()?;
    let summary = summarize(&runs)?;
    summary.save(&base.output_dir.join(SUMMARY_FILE))?;
    Ok(summary)
}
