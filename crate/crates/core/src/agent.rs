//! The two-memory agent and its single-memory baselines.
//!
//! Before each training episode the agent picks one memory to act with:
//! episodic control with probability `p_ec`, otherwise the Q-table. Every
//! transition enters a shared replay buffer that trains the Q-table every
//! `train_every` environment steps, and every finished episode is folded
//! into the episodic memory. With data sharing off, each memory learns
//! only from the episodes it drove.

use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{ActionId, Environment, StateId};
use crate::episodic::{EcMemory, FeatureExtractor, FeatureKind};
use crate::error::{Error, Result};
use crate::qlearning::QTable;
use crate::replay::{MemoryKind, ReplayBuffer, Transition};
use crate::schedule::Schedule;

pub const SCORE_WINDOW: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentMode {
    TwoMemory,
    /// Acts with and trains only the episodic memory.
    PureEc,
    /// Acts with and trains only the Q-table.
    PureRl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub mode: AgentMode,
    pub epsilon: f64,
    pub train_every: u64,
    pub batch_size: usize,
    pub schedule: Schedule,
    pub data_sharing: bool,
    pub seed: u64,
    pub alpha: f64,
    /// Discount for both memories; the environment default when unset.
    pub gamma: Option<f64>,
    pub k: usize,
    pub ec_capacity: usize,
    pub replay_capacity: usize,
    pub features: FeatureKind,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            mode: AgentMode::TwoMemory,
            epsilon: 0.1,
            train_every: 10,
            batch_size: 32,
            schedule: Schedule {
                p_start: 0.9,
                p_end: 0.1,
                temperature: 10_000.0,
            },
            data_sharing: true,
            seed: 0,
            alpha: 0.1,
            gamma: None,
            k: 3,
            ec_capacity: 100_000,
            replay_capacity: 100_000,
            features: FeatureKind::Identity,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad(format!("epsilon = {} is not in [0, 1]", self.epsilon));
        }
        if self.train_every == 0 {
            return bad("train_every must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha = {} is not in (0, 1]", self.alpha));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return bad(format!("gamma = {g} is not in (0, 1]"));
            }
        }
        if self.k == 0 || self.ec_capacity == 0 || self.replay_capacity == 0 {
            return bad("k, ec_capacity and replay_capacity must be positive".into());
        }
        if let FeatureKind::RandomProjection { dim: 0, .. } = self.features {
            return bad("random projection dimension must be positive".into());
        }
        self.schedule.validate()
    }
}

/// Rolling mean of the last [`SCORE_WINDOW`] undiscounted training returns
/// of each memory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreTracker {
    windows: [VecDeque<f64>; 2],
    counts: [u64; 2],
}

impl ScoreTracker {
    pub fn record(&mut self, kind: MemoryKind, episode_return: f64) {
        let window = &mut self.windows[kind as usize];
        if window.len() == SCORE_WINDOW {
            window.pop_front();
        }
        window.push_back(episode_return);
        self.counts[kind as usize] += 1;
    }

    /// `None` until the memory has finished an episode.
    pub fn score(&self, kind: MemoryKind) -> Option<f64> {
        let window = &self.windows[kind as usize];
        (!window.is_empty()).then(|| window.iter().sum::<f64>() / window.len() as f64)
    }

    pub fn window(&self, kind: MemoryKind) -> &VecDeque<f64> {
        &self.windows[kind as usize]
    }

    pub fn count(&self, kind: MemoryKind) -> u64 {
        self.counts[kind as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub episode_return: f64,
    pub memory: MemoryKind,
    pub steps: usize,
}

/// A training episode in progress; see [`TwoMemoryAgent::begin_episode`].
#[derive(Clone, Debug)]
pub struct ActiveEpisode {
    memory: MemoryKind,
    state: StateId,
    trajectory: Vec<Transition>,
    episode_return: f64,
    done: bool,
    truncated: bool,
}

impl ActiveEpisode {
    pub fn memory(&self) -> MemoryKind {
        self.memory
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Ended by the step cap rather than at an absorbing state.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn trajectory(&self) -> &[Transition] {
        &self.trajectory
    }
}

#[derive(Clone, Debug)]
pub struct TwoMemoryAgent {
    config: AgentConfig,
    gamma: f64,
    action_count: usize,
    ec: EcMemory,
    rl: QTable,
    buffer: ReplayBuffer,
    tracker: ScoreTracker,
    global_step: u64,
    td_updates: u64,
    rng: ChaCha8Rng,
    eval_rng: ChaCha8Rng,
    batch_log: Option<Vec<Transition>>,
}

impl TwoMemoryAgent {
    pub fn new(config: AgentConfig, env: &dyn Environment) -> Result<Self> {
        config.validate()?;
        let spec = env.spec();
        let gamma = config.gamma.unwrap_or(spec.discount_default);
        let feature_dim = env.features(StateId(0)).len();
        let extractor = FeatureExtractor::from_kind(config.features, feature_dim);
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut eval_rng = rng.clone();
        eval_rng.set_stream(1);
        Ok(Self {
            gamma,
            action_count: spec.action_count,
            ec: EcMemory::new(spec.action_count, config.ec_capacity, config.k, extractor),
            rl: QTable::new(spec.state_count, spec.action_count, config.alpha, gamma),
            buffer: ReplayBuffer::new(config.replay_capacity),
            tracker: ScoreTracker::default(),
            global_step: 0,
            td_updates: 0,
            rng,
            eval_rng,
            batch_log: None,
            config,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn ec(&self) -> &EcMemory {
        &self.ec
    }

    pub fn ec_mut(&mut self) -> &mut EcMemory {
        &mut self.ec
    }

    pub fn rl(&self) -> &QTable {
        &self.rl
    }

    pub fn rl_mut(&mut self) -> &mut QTable {
        &mut self.rl
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn tracker(&self) -> &ScoreTracker {
        &self.tracker
    }

    pub fn global_step(&self) -> u64 {
        self.global_step
    }

    pub fn td_updates(&self) -> u64 {
        self.td_updates
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Keeps a copy of every transition handed to the Q-table from now on.
    pub fn record_batches(&mut self) {
        self.batch_log.get_or_insert_with(Vec::new);
    }

    pub fn recorded_batches(&self) -> &[Transition] {
        self.batch_log.as_deref().unwrap_or(&[])
    }

    /// Probability that the next training episode acts with episodic control.
    pub fn p_ec(&self) -> f64 {
        match self.config.mode {
            AgentMode::TwoMemory => self.config.schedule.p_ec(self.global_step),
            AgentMode::PureEc => 1.0,
            AgentMode::PureRl => 0.0,
        }
    }

    pub fn select_memory_for_episode(&mut self) -> MemoryKind {
        match self.config.mode {
            AgentMode::PureEc => MemoryKind::Ec,
            AgentMode::PureRl => MemoryKind::Rl,
            AgentMode::TwoMemory => {
                let p = self.p_ec();
                if self.rng.random::<f64>() < p {
                    MemoryKind::Ec
                } else {
                    MemoryKind::Rl
                }
            }
        }
    }

    /// The memory with the better recent training score; RL wins ties and a
    /// memory without episodes never wins. EC when neither has any.
    pub fn select_memory_for_eval(&self) -> MemoryKind {
        match self.config.mode {
            AgentMode::PureEc => MemoryKind::Ec,
            AgentMode::PureRl => MemoryKind::Rl,
            AgentMode::TwoMemory => {
                match (
                    self.tracker.score(MemoryKind::Rl),
                    self.tracker.score(MemoryKind::Ec),
                ) {
                    (None, _) => MemoryKind::Ec,
                    (Some(_), None) => MemoryKind::Rl,
                    (Some(rl), Some(ec)) if rl >= ec => MemoryKind::Rl,
                    _ => MemoryKind::Ec,
                }
            }
        }
    }

    fn greedy(
        ec: &EcMemory,
        rl: &QTable,
        memory: MemoryKind,
        state: StateId,
        env: &dyn Environment,
        rng: &mut dyn RngCore,
    ) -> ActionId {
        match memory {
            MemoryKind::Ec => ec.select_action(env.features(state), rng),
            MemoryKind::Rl => rl.greedy_action(state),
        }
    }

    /// Epsilon-greedy action from `memory` using the training stream.
    pub fn act(&mut self, memory: MemoryKind, state: StateId, env: &dyn Environment) -> ActionId {
        if self.rng.random::<f64>() < self.config.epsilon {
            ActionId(self.rng.random_range(0..self.action_count))
        } else {
            Self::greedy(&self.ec, &self.rl, memory, state, env, &mut self.rng)
        }
    }

    pub fn begin_episode(&mut self, env: &mut dyn Environment) -> ActiveEpisode {
        let memory = self.select_memory_for_episode();
        let state = env.reset(&mut self.rng);
        ActiveEpisode {
            memory,
            state,
            trajectory: Vec::new(),
            episode_return: 0.0,
            done: false,
            truncated: false,
        }
    }

    /// Takes one environment step of `episode`, training the Q-table when the
    /// global step hits the cadence. Returns whether the episode ended.
    pub fn advance(
        &mut self,
        episode: &mut ActiveEpisode,
        env: &mut dyn Environment,
    ) -> Result<bool> {
        if episode.done {
            return Err(Error::StepAfterTerminal);
        }
        let action = self.act(episode.memory, episode.state, env);
        let step = env.step(action, &mut self.rng)?;
        let transition = Transition {
            state: episode.state,
            action,
            reward: step.reward,
            next_state: step.next_state,
            terminal: step.absorbing(),
            source: episode.memory,
        };
        self.buffer.push(transition);
        episode.trajectory.push(transition);
        episode.episode_return += step.reward;
        episode.state = step.next_state;
        episode.done = step.terminal;
        episode.truncated = step.truncated;
        self.global_step += 1;
        if self.global_step % self.config.train_every == 0 {
            self.train_rl();
        }
        Ok(episode.done)
    }

    fn train_rl(&mut self) {
        if self.config.mode == AgentMode::PureEc {
            return;
        }
        let filter = (!self.config.data_sharing).then_some(MemoryKind::Rl);
        let batch = self
            .buffer
            .sample_uniform(self.config.batch_size, &mut self.rng, filter);
        if batch.is_empty() {
            return;
        }
        self.rl.td_update(&batch);
        self.td_updates += 1;
        if let Some(log) = &mut self.batch_log {
            log.extend_from_slice(&batch);
        }
    }

    /// Folds a finished episode into the episodic memory and the score
    /// tracker.
    pub fn finish_episode(
        &mut self,
        episode: ActiveEpisode,
        env: &dyn Environment,
    ) -> Result<EpisodeOutcome> {
        if !episode.done {
            return Err(Error::Config(
                "finish_episode called on an unfinished episode".into(),
            ));
        }
        // A capped episode's tail sums are not returns; under the max rule
        // they would stick as optimistic values.
        let update_ec = !episode.truncated
            && match self.config.mode {
                AgentMode::PureRl => false,
                AgentMode::PureEc => true,
                AgentMode::TwoMemory => {
                    self.config.data_sharing || episode.memory == MemoryKind::Ec
                }
            };
        if update_ec {
            self.ec
                .update_from_episode(&episode.trajectory, self.gamma, |s| env.features(s))?;
        }
        self.tracker.record(episode.memory, episode.episode_return);
        Ok(EpisodeOutcome {
            episode_return: episode.episode_return,
            memory: episode.memory,
            steps: episode.trajectory.len(),
        })
    }

    pub fn run_training_episode(&mut self, env: &mut dyn Environment) -> Result<EpisodeOutcome> {
        let mut episode = self.begin_episode(env);
        while !self.advance(&mut episode, env)? {}
        self.finish_episode(episode, env)
    }

    /// One fully greedy episode with the evaluation memory. Touches nothing
    /// but the environment and the evaluation random stream.
    pub fn run_eval_episode(&mut self, env: &mut dyn Environment) -> Result<(f64, MemoryKind)> {
        let memory = self.select_memory_for_eval();
        let mut state = env.reset(&mut self.eval_rng);
        let mut total = 0.0;
        loop {
            let action = Self::greedy(&self.ec, &self.rl, memory, state, env, &mut self.eval_rng);
            let step = env.step(action, &mut self.eval_rng)?;
            total += step.reward;
            state = step.next_state;
            if step.terminal {
                return Ok((total, memory));
            }
        }
    }
}
