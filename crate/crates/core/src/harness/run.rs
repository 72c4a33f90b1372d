use std::path::PathBuf;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::metrics::{MetricsRow, RecordKind, RunMetrics};
use crate::agent::{AgentConfig, TwoMemoryAgent};
use crate::env::{make_env, Environment};
use crate::error::{Error, Result};
use crate::replay::MemoryKind;

fn snapshot(
    agent: &TwoMemoryAgent,
    env: &dyn Environment,
    global_step: u64,
    record_kind: RecordKind,
) -> MetricsRow {
    MetricsRow {
        global_step,
        record_kind,
        episode_return: None,
        episode_steps: None,
        memory_used: None,
        p_ec: agent.p_ec(),
        q_sum_rl: agent.rl().q_sum(env),
        ec_table_size: agent.ec().len(),
        score_rl: agent.tracker().score(MemoryKind::Rl),
        score_ec: agent.tracker().score(MemoryKind::Ec),
    }
}

/// Trains one agent for `config.total_steps` environment steps, evaluating
/// it greedily every `eval_interval` steps on a separate environment
/// instance. Evaluation can fall mid-episode; the episode in progress when
/// the budget runs out is dropped.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<RunMetrics> {
    let wrap = |step: u64, source: Error| Error::Run {
        seed,
        step,
        source: Box::new(source),
    };
    let env_file = config.env_file.as_deref();
    let mut env = make_env(&config.env_name, env_file).map_err(|e| wrap(0, e))?;
    let mut eval_env = make_env(&config.env_name, env_file).map_err(|e| wrap(0, e))?;
    let agent_config = AgentConfig {
        seed,
        ..config.agent.clone()
    };
    let mut agent = TwoMemoryAgent::new(agent_config, env.as_ref()).map_err(|e| wrap(0, e))?;

    let mut metrics = RunMetrics::default();
    metrics.push(snapshot(&agent, env.as_ref(), 0, RecordKind::State));
    let mut next_checkpoint = config.eval_interval;

    'training: while agent.global_step() < config.total_steps {
        let mut episode = agent.begin_episode(env.as_mut());
        loop {
            let done = agent
                .advance(&mut episode, env.as_mut())
                .map_err(|e| wrap(agent.global_step(), e))?;
            let step = agent.global_step();
            if step == next_checkpoint {
                let mut total = 0.0;
                let mut memory = MemoryKind::Ec;
                for _ in 0..config.eval_episodes {
                    let (ret, used) = agent
                        .run_eval_episode(eval_env.as_mut())
                        .map_err(|e| wrap(step, e))?;
                    total += ret;
                    memory = used;
                }
                metrics.push(MetricsRow {
                    episode_return: Some(total / config.eval_episodes as f64),
                    memory_used: Some(memory),
                    ..snapshot(&agent, env.as_ref(), step, RecordKind::Eval)
                });
                next_checkpoint += config.eval_interval;
            }
            if step >= config.total_steps && !done {
                break 'training;
            }
            if done {
                break;
            }
        }
        let outcome = agent
            .finish_episode(episode, env.as_ref())
            .map_err(|e| wrap(agent.global_step(), e))?;
        metrics.push(MetricsRow {
            episode_return: Some(outcome.episode_return),
            episode_steps: Some(outcome.steps as u64),
            memory_used: Some(outcome.memory),
            ..snapshot(&agent, env.as_ref(), agent.global_step(), RecordKind::Train)
        });
    }
    Ok(metrics)
}

/// Runs every seed (in parallel) and writes one CSV per seed. Seeds that
/// succeed are written even when another seed fails; the first failure is
/// returned.
pub fn run(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let results: Vec<Result<PathBuf>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let metrics = run_seed(config, seed)?;
            let path = config.csv_path(seed);
            metrics.save(&path)?;
            Ok(path)
        })
        .collect();
    results.into_iter().collect()
}
