use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use twomem::harness::{
    ablation_suite, report, run, run_seed, ExperimentConfig, AGGREGATE_FILE, BANDS_PLOT,
    Q_SUM_PLOT, RETURNS_PLOT, SUMMARY_FILE,
};
use twomem::{AgentMode, Error, MemoryKind};

fn config(dir: &Path, body: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!("output_dir = '{}'\n{body}", dir.display())).unwrap()
}

fn tree(dir: &Path, mode: &str, seeds: &str, steps: u64) -> ExperimentConfig {
    config(
        dir,
        &format!(
            "env = \"motivating_tree\"\ntotal_steps = {steps}\neval_interval = 100\nseeds = {seeds}\n[agent]\nmode = \"{mode}\"\n"
        ),
    )
}

#[test]
fn pure_ec_run_evaluates_with_ec_throughout() {
    let dir = tempfile::tempdir().unwrap();
    let c = tree(dir.path(), "pure_ec", "[4]", 1_000);
    let paths = run(&c).unwrap();
    assert_eq!(paths, [dir.path().join("pure_ec_seed4.csv")]);
    let metrics = twomem::harness::RunMetrics::load(&paths[0]).unwrap();
    let evals: Vec<_> = metrics.evals().collect();
    assert_eq!(evals.len(), 10);
    assert!(evals.iter().all(|r| r.memory_used == Some(MemoryKind::Ec)));
    assert_eq!(
        metrics.checkpoints(),
        (1..=10).map(|i| i * 100).collect::<Vec<_>>()
    );
    let steps: Vec<u64> = metrics.rows.iter().map(|r| r.global_step).collect();
    assert!(steps.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn default_windy_run_has_a_hundred_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig::windy_grid(AgentMode::TwoMemory, vec![1], dir.path());
    let metrics = run_seed(&c, 1).unwrap();
    assert_eq!(metrics.evals().count(), 100);
    assert_eq!(metrics.checkpoints().last(), Some(&50_000));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let c = tree(dir.path(), "two_memory", "[1, 2, 3]", 2_000);
    let first: Vec<Vec<u8>> = run(&c)
        .unwrap()
        .iter()
        .map(|p| std::fs::read(p).unwrap())
        .collect();
    assert_eq!(first.len(), 3);
    let second: Vec<Vec<u8>> = run(&c)
        .unwrap()
        .iter()
        .map(|p| std::fs::read(p).unwrap())
        .collect();
    assert_eq!(first, second);
    assert_ne!(first[0], first[1]);
}

/// (label, step) -> eval returns, straight from the CSV text.
fn raw_returns(paths: &[PathBuf]) -> BTreeMap<(String, u64), Vec<f64>> {
    let mut out: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
    for p in paths {
        let stem = p.file_stem().unwrap().to_str().unwrap();
        let label = &stem[..stem.rfind("_seed").unwrap()];
        let mut reader = csv::Reader::from_path(p).unwrap();
        let header = reader.headers().unwrap().clone();
        let col = |name: &str| header.iter().position(|h| h == name).unwrap();
        let (step, kind, ret) = (
            col("global_step"),
            col("record_kind"),
            col("episode_return"),
        );
        for record in reader.records() {
            let record = record.unwrap();
            if &record[kind] == "eval" {
                out.entry((label.to_string(), record[step].parse().unwrap()))
                    .or_default()
                    .push(record[ret].parse().unwrap());
            }
        }
    }
    out
}

#[test]
fn aggregate_matches_brute_force_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = run(&tree(dir.path(), "two_memory", "[1, 2, 3]", 1_000)).unwrap();
    paths.extend(run(&tree(dir.path(), "pure_rl", "[1, 2, 3]", 1_000)).unwrap());
    let out = dir.path().join("report");
    let written = report(&paths, &out).unwrap();
    for name in [AGGREGATE_FILE, RETURNS_PLOT, Q_SUM_PLOT, BANDS_PLOT] {
        assert!(written.contains(&out.join(name)), "{name} missing");
    }
    let summary = twomem::harness::SweepSummary::load(&out.join(AGGREGATE_FILE)).unwrap();
    let oracle = raw_returns(&paths);
    assert_eq!(summary.rows.len(), oracle.len());
    for ((label, step), values) in &oracle {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        let row = summary.get(label, *step).unwrap();
        assert!((row.eval_return_mean - mean).abs() < 1e-9);
        assert!((row.eval_return_std - std).abs() < 1e-9);
        assert_eq!(row.runs, 3);
    }
    let svg = std::fs::read_to_string(out.join(RETURNS_PLOT)).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn single_run_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let paths = run(&tree(dir.path(), "pure_rl", "[9]", 500)).unwrap();
    report(&paths, &dir.path().join("r")).unwrap();
    let summary =
        twomem::harness::SweepSummary::load(&dir.path().join("r").join(AGGREGATE_FILE)).unwrap();
    assert!(summary
        .rows
        .iter()
        .all(|r| r.eval_return_std == 0.0 && r.q_sum_std == 0.0));
}

#[test]
fn mismatched_grids_name_the_offending_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&tree(dir.path(), "pure_rl", "[1]", 1_000)).unwrap();
    let b = run(&tree(dir.path(), "pure_ec", "[1]", 500)).unwrap();
    let paths = [a, b.clone()].concat();
    match report(&paths, &dir.path().join("r")) {
        Err(Error::GridMismatch(files)) => assert_eq!(files, b),
        other => panic!("expected grid mismatch, got {other:?}"),
    }
}

#[test]
fn empty_report_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = report(&[], dir.path()).unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn ablation_runs_the_whole_grid() {
    let dir = tempfile::tempdir().unwrap();
    let base = tree(dir.path(), "two_memory", "[1, 2]", 500);
    let summary = ablation_suite(&base).unwrap();
    let labels = summary.labels();
    assert_eq!(labels.len(), 8);
    assert!(labels.contains(&"2m_ods_increased") && labels.contains(&"pure_ec"));
    assert!(summary.rows.iter().all(|r| r.runs == 2));
    let csvs = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "csv")
        })
        .count();
    // 16 runs plus the summary
    assert_eq!(csvs, 17);
    let reloaded = twomem::harness::SweepSummary::load(&dir.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(reloaded.rows.len(), summary.rows.len());
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn failures_name_seed_and_step() {
    let dir = tempfile::tempdir().unwrap();
    let mdp = dir.path().join("gone.mdp");
    std::fs::write(&mdp, "states 2\nactions 1\nstart 0\n0 0 1 1.0 0 true\n").unwrap();
    let c = config(
        dir.path(),
        &format!("env = \"tabular\"\nenv_file = '{}'\ntotal_steps = 100\neval_interval = 50\nseeds = [7]\n", mdp.display()),
    );
    std::fs::remove_file(&mdp).unwrap();
    match run(&c) {
        Err(Error::Run {
            seed: 7, step: 0, ..
        }) => {}
        other => panic!("expected a run failure, got {other:?}"),
    }
}
