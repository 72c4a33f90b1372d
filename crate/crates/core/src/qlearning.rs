//! Tabular one-step Q-learning trained from replayed transitions.

use std::fmt::Write as _;

use crate::env::{ActionId, Environment, StateId};
use crate::replay::Transition;

#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    action_count: usize,
    alpha: f64,
    gamma: f64,
}

impl QTable {
    /// Zero-initialised table.
    pub fn new(state_count: usize, action_count: usize, alpha: f64, gamma: f64) -> Self {
        assert!(action_count > 0);
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha {alpha} outside (0, 1]");
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma {gamma} outside (0, 1]");
        Self {
            values: vec![0.0; state_count * action_count],
            action_count,
            alpha,
            gamma,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn get(&self, state: StateId, action: ActionId) -> f64 {
        self.values[state.0 * self.action_count + action.0]
    }

    pub fn set(&mut self, state: StateId, action: ActionId, value: f64) {
        assert!(value.is_finite());
        self.values[state.0 * self.action_count + action.0] = value;
    }

    pub fn row(&self, state: StateId) -> &[f64] {
        &self.values[state.0 * self.action_count..(state.0 + 1) * self.action_count]
    }

    pub fn max_value(&self, state: StateId) -> f64 {
        self.row(state)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies the one-step update to each transition in order and returns
    /// the mean absolute TD error measured before each update.
    pub fn td_update(&mut self, batch: &[Transition]) -> f64 {
        assert!(!batch.is_empty(), "td_update needs a non-empty batch");
        let mut total = 0.0;
        for t in batch {
            let target = if t.terminal {
                t.reward
            } else {
                t.reward + self.gamma * self.max_value(t.next_state)
            };
            let idx = t.state.0 * self.action_count + t.action.0;
            let error = target - self.values[idx];
            self.values[idx] += self.alpha * error;
            total += error.abs();
        }
        total / batch.len() as f64
    }

    /// Argmax over actions; ties go to the lowest index.
    pub fn greedy_action(&self, state: StateId) -> ActionId {
        let row = self.row(state);
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = a;
            }
        }
        ActionId(best)
    }

    pub fn q_sum(&self, env: &dyn Environment) -> f64 {
        env.enumerate_state_actions()
            .into_iter()
            .map(|(s, a)| self.get(s, a))
            .sum()
    }

    /// `state action value` lines for every nonzero entry.
    pub fn snapshot(&self) -> String {
        let mut out = String::from("# state action value\n");
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    i / self.action_count,
                    i % self.action_count,
                    v
                );
            }
        }
        out
    }
}
