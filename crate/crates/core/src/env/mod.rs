//! Episodic MDP interface and the bundled environments.
//!
//! Every environment here is tabular: a finite state set, a uniform action
//! set, and an explicit transition table. [`TabularMdp`] carries the shared
//! stepping logic; the motivating tree and the windy grid are particular
//! tables built by [`motivating_tree`] and [`WindyGridLayout::build`].

mod tabular;
mod tree;
mod windy;

use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use tabular::{Outcome, TabularMdp};
pub use tree::{motivating_tree, tree_action, tree_state};
pub use windy::{Cell, WindSemantics, WindyGridLayout, DOWN, LEFT, RIGHT, UP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResult {
    pub next_state: StateId,
    pub reward: f64,
    /// The episode is over, either at an absorbing state or at the step cap.
    pub terminal: bool,
    /// The episode ended only because the step cap was reached.
    pub truncated: bool,
}

impl StepResult {
    /// True when the next state is absorbing, i.e. its value must not be
    /// bootstrapped. Cap-truncated steps are not absorbing.
    pub fn absorbing(&self) -> bool {
        self.terminal && !self.truncated
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvSpec {
    pub name: String,
    pub state_count: usize,
    pub action_count: usize,
    pub max_episode_steps: usize,
    pub discount_default: f64,
}

pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    fn reset(&mut self, rng: &mut dyn RngCore) -> StateId;

    /// Samples the next state and reward. Stepping after a terminal step,
    /// without an intervening reset, is an error.
    fn step(&mut self, action: ActionId, rng: &mut dyn RngCore) -> Result<StepResult>;

    /// Embedding of a state used for nearest-neighbour lookups.
    fn features(&self, state: StateId) -> &[f64];

    /// Every (state, action) pair exactly once, states outer, actions inner.
    fn enumerate_state_actions(&self) -> Vec<(StateId, ActionId)> {
        let spec = self.spec();
        (0..spec.state_count)
            .flat_map(|s| (0..spec.action_count).map(move |a| (StateId(s), ActionId(a))))
            .collect()
    }
}

pub const MOTIVATING_TREE: &str = "motivating_tree";
pub const WINDY_GRID: &str = "windy_grid";
pub const TABULAR: &str = "tabular";

/// Builds an environment by harness name. `tabular` needs a table file.
pub fn make_env(name: &str, table: Option<&Path>) -> Result<Box<dyn Environment>> {
    match name {
        MOTIVATING_TREE => Ok(Box::new(motivating_tree())),
        WINDY_GRID => Ok(Box::new(WindyGridLayout::default().build())),
        TABULAR => {
            let path = table
                .ok_or_else(|| Error::Config("env `tabular` requires `env_file`".to_string()))?;
            Ok(Box::new(TabularMdp::load(path)?))
        }
        other => Err(Error::UnknownEnvironment(other.to_string())),
    }
}

pub fn is_known_env(name: &str) -> bool {
    matches!(name, MOTIVATING_TREE | WINDY_GRID | TABULAR)
}
