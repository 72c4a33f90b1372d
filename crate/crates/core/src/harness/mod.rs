//! Seeded experiment runner, metrics files, ablation grid and reports.

mod ablation;
mod config;
mod metrics;
mod report;
mod run;
mod svg;

pub use ablation::{ablation_suite, ablation_variants, SCHEDULES, SUMMARY_FILE};
pub use config::{mode_name, ExperimentConfig};
pub use metrics::{MetricsRow, RecordKind, RunMetrics, HEADER};
pub use report::{
    label_of, load_runs, report, summarize, AggregateRow, LabelledRun, SweepSummary,
    AGGREGATE_FILE, BANDS_PLOT, Q_SUM_PLOT, RETURNS_PLOT,
};
pub use run::{run, run_seed};
