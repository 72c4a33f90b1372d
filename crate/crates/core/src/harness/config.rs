use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agent::{AgentConfig, AgentMode};
use crate::env::{is_known_env, TABULAR};
use crate::episodic::FeatureKind;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub env_name: String,
    /// Transition table for the `tabular` environment.
    pub env_file: Option<PathBuf>,
    /// Prefix of the per-seed CSV names; defaults to the agent mode.
    pub label: String,
    pub agent: AgentConfig,
    pub total_steps: u64,
    pub eval_interval: u64,
    pub eval_episodes: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    env: String,
    env_file: Option<PathBuf>,
    label: Option<String>,
    total_steps: u64,
    #[serde(default = "defaults::eval_interval")]
    eval_interval: u64,
    #[serde(default = "defaults::eval_episodes")]
    eval_episodes: usize,
    seeds: Vec<u64>,
    #[serde(default = "defaults::output_dir")]
    output_dir: PathBuf,
    #[serde(default)]
    agent: RawAgent,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    #[serde(default = "defaults::mode")]
    mode: AgentMode,
    #[serde(default = "defaults::epsilon")]
    epsilon: f64,
    #[serde(default = "defaults::train_every")]
    train_every: u64,
    #[serde(default = "defaults::batch_size")]
    batch_size: usize,
    #[serde(default = "defaults::data_sharing")]
    data_sharing: bool,
    #[serde(default = "defaults::alpha")]
    alpha: f64,
    gamma: Option<f64>,
    #[serde(default = "defaults::k")]
    k: usize,
    #[serde(default = "defaults::capacity")]
    ec_capacity: usize,
    #[serde(default = "defaults::capacity")]
    replay_capacity: usize,
    #[serde(default)]
    features: FeatureKind,
    #[serde(default)]
    schedule: RawSchedule,
}

impl Default for RawAgent {
    fn default() -> Self {
        toml::from_str("").expect("all agent fields have defaults")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default = "defaults::p_start")]
    p_start: f64,
    #[serde(default = "defaults::p_end")]
    p_end: f64,
    temperature: Option<f64>,
}

impl Default for RawSchedule {
    fn default() -> Self {
        Self {
            p_start: defaults::p_start(),
            p_end: defaults::p_end(),
            temperature: None,
        }
    }
}

mod defaults {
    use std::path::PathBuf;

    use crate::agent::{AgentConfig, AgentMode};

    pub fn eval_interval() -> u64 {
        500
    }
    pub fn eval_episodes() -> usize {
        5
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("runs")
    }
    pub fn mode() -> AgentMode {
        AgentMode::TwoMemory
    }
    pub fn epsilon() -> f64 {
        AgentConfig::default().epsilon
    }
    pub fn train_every() -> u64 {
        AgentConfig::default().train_every
    }
    pub fn batch_size() -> usize {
        AgentConfig::default().batch_size
    }
    pub fn data_sharing() -> bool {
        true
    }
    pub fn alpha() -> f64 {
        AgentConfig::default().alpha
    }
    pub fn k() -> usize {
        AgentConfig::default().k
    }
    pub fn capacity() -> usize {
        100_000
    }
    pub fn p_start() -> f64 {
        0.9
    }
    pub fn p_end() -> f64 {
        0.1
    }
}

pub fn mode_name(mode: AgentMode) -> &'static str {
    match mode {
        AgentMode::TwoMemory => "two_memory",
        AgentMode::PureEc => "pure_ec",
        AgentMode::PureRl => "pure_rl",
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let a = raw.agent;
        let temperature = a
            .schedule
            .temperature
            .unwrap_or(raw.total_steps as f64 / 5.0);
        let agent = AgentConfig {
            mode: a.mode,
            epsilon: a.epsilon,
            train_every: a.train_every,
            batch_size: a.batch_size,
            schedule: Schedule {
                p_start: a.schedule.p_start,
                p_end: a.schedule.p_end,
                temperature,
            },
            data_sharing: a.data_sharing,
            seed: 0,
            alpha: a.alpha,
            gamma: a.gamma,
            k: a.k,
            ec_capacity: a.ec_capacity,
            replay_capacity: a.replay_capacity,
            features: a.features,
        };
        let config = Self {
            label: raw
                .label
                .unwrap_or_else(|| mode_name(agent.mode).to_string()),
            env_name: raw.env,
            env_file: raw.env_file,
            agent,
            total_steps: raw.total_steps,
            eval_interval: raw.eval_interval,
            eval_episodes: raw.eval_episodes,
            seeds: raw.seeds,
            output_dir: raw.output_dir,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Default WindyGrid experiment for one agent mode.
    pub fn windy_grid(mode: AgentMode, seeds: Vec<u64>, output_dir: impl Into<PathBuf>) -> Self {
        let total_steps = 50_000;
        Self {
            env_name: crate::env::WINDY_GRID.to_string(),
            env_file: None,
            label: mode_name(mode).to_string(),
            agent: AgentConfig {
                mode,
                schedule: Schedule::for_budget(0.9, 0.1, total_steps).expect("valid defaults"),
                ..AgentConfig::default()
            },
            total_steps,
            eval_interval: 500,
            eval_episodes: 5,
            seeds,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !is_known_env(&self.env_name) {
            return Err(Error::UnknownEnvironment(self.env_name.clone()));
        }
        if self.env_name == TABULAR && self.env_file.is_none() {
            return bad("env `tabular` requires `env_file`".into());
        }
        if self.seeds.is_empty() {
            return bad("`seeds` must list at least one seed".into());
        }
        if self.eval_interval == 0 || self.eval_episodes == 0 {
            return bad("eval_interval and eval_episodes must be positive".into());
        }
        if self.total_steps < self.eval_interval {
            return bad(format!(
                "total_steps ({}) is smaller than eval_interval ({})",
                self.total_steps, self.eval_interval
            ));
        }
        if self.label.is_empty() || self.label.contains(['/', '\\']) || self.label.contains("_seed")
        {
            return bad(format!("label `{}` cannot name an output file", self.label));
        }
        self.agent.validate()
    }

    pub fn csv_path(&self, seed: u64) -> PathBuf {
        self.output_dir
            .join(format!("{}_seed{}.csv", self.label, seed))
    }
}
