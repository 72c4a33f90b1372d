use std::path::Path;

use rand::{Rng, RngCore};

use super::{ActionId, EnvSpec, Environment, StateId, StepResult};
use crate::error::{Error, Result};

const PROBABILITY_TOLERANCE: f64 = 1e-9;
const DEFAULT_MAX_STEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub next_state: StateId,
    pub probability: f64,
    pub reward: f64,
    pub terminal: bool,
}

/// A finite MDP given by an explicit transition table.
///
/// A state with no outgoing rows is absorbing and is never stepped from.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    spec: EnvSpec,
    start: StateId,
    // Indexed by `state * action_count + action`.
    table: Vec<Vec<Outcome>>,
    features: Vec<Vec<f64>>,
    current: StateId,
    steps: usize,
    done: bool,
}

impl TabularMdp {
    pub fn new(
        spec: EnvSpec,
        start: StateId,
        table: Vec<Vec<Outcome>>,
        features: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let invalid = |message: String| Error::MdpFormat { line: 0, message };
        if spec.state_count == 0 || spec.action_count == 0 {
            return Err(invalid("state and action counts must be positive".into()));
        }
        if spec.max_episode_steps == 0 {
            return Err(invalid("max_episode_steps must be at least 1".into()));
        }
        if !(spec.discount_default > 0.0 && spec.discount_default <= 1.0) {
            return Err(invalid(format!(
                "discount {} outside (0, 1]",
                spec.discount_default
            )));
        }
        if table.len() != spec.state_count * spec.action_count {
            return Err(invalid(
                "table size does not match state x action count".into(),
            ));
        }
        if features.len() != spec.state_count {
            return Err(invalid("one feature vector per state required".into()));
        }
        let dim = features[0].len();
        if features.iter().any(|f| f.len() != dim) {
            return Err(invalid("feature vectors differ in length".into()));
        }
        if start.0 >= spec.state_count {
            return Err(invalid(format!("start state {} out of range", start.0)));
        }
        for s in 0..spec.state_count {
            let rows = &table[s * spec.action_count..(s + 1) * spec.action_count];
            let filled = rows.iter().filter(|r| !r.is_empty()).count();
            if filled != 0 && filled != spec.action_count {
                return Err(invalid(format!("state {s} defines only some actions")));
            }
            for (a, outcomes) in rows.iter().enumerate() {
                if outcomes.is_empty() {
                    continue;
                }
                let total: f64 = outcomes.iter().map(|o| o.probability).sum();
                if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(invalid(format!(
                        "probabilities for state {s} action {a} sum to {total}"
                    )));
                }
                for o in outcomes {
                    if o.next_state.0 >= spec.state_count {
                        return Err(invalid(format!(
                            "next state {} out of range",
                            o.next_state.0
                        )));
                    }
                    if !(o.probability >= 0.0) || !o.reward.is_finite() {
                        return Err(invalid(format!("bad row for state {s} action {a}")));
                    }
                }
            }
        }
        if table[start.0 * spec.action_count].is_empty() {
            return Err(invalid("start state is absorbing".into()));
        }
        Ok(Self {
            spec,
            start,
            table,
            features,
            current: start,
            steps: 0,
            done: false,
        })
    }

    /// Parses the plain-text transition table format described in
    /// `docs/formats.md`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = "tabular".to_string();
        let mut states = None;
        let mut actions = None;
        let mut start = None;
        let mut max_steps = DEFAULT_MAX_STEPS;
        let mut discount = 1.0;
        let mut rows: Vec<(usize, usize, usize, Outcome)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::MdpFormat {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| s.parse::<usize>().map_err(|e| err(format!("`{s}`: {e}")));
            let real = |s: &str| s.parse::<f64>().map_err(|e| err(format!("`{s}`: {e}")));
            match fields.as_slice() {
                ["name", value] => name = value.to_string(),
                ["states", n] => states = Some(int(n)?),
                ["actions", n] => actions = Some(int(n)?),
                ["start", n] => start = Some(int(n)?),
                ["max_steps", n] => max_steps = int(n)?,
                ["discount", g] => discount = real(g)?,
                [s, a, next, p, r, t] => {
                    let terminal = match *t {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        other => return Err(err(format!("terminal flag `{other}`"))),
                    };
                    let outcome = Outcome {
                        next_state: StateId(int(next)?),
                        probability: real(p)?,
                        reward: real(r)?,
                        terminal,
                    };
                    rows.push((line_no, int(s)?, int(a)?, outcome));
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }

        let missing = |what: &str| Error::MdpFormat {
            line: 0,
            message: format!("missing `{what}`"),
        };
        let state_count = states.ok_or_else(|| missing("states"))?;
        let action_count = actions.ok_or_else(|| missing("actions"))?;
        let start = start.ok_or_else(|| missing("start"))?;

        let mut table = vec![Vec::new(); state_count * action_count];
        for (line, s, a, outcome) in rows {
            if s >= state_count || a >= action_count {
                return Err(Error::MdpFormat {
                    line,
                    message: format!("state {s} / action {a} out of range"),
                });
            }
            table[s * action_count + a].push(outcome);
        }
        let features = (0..state_count)
            .map(|s| {
                let mut one_hot = vec![0.0; state_count];
                one_hot[s] = 1.0;
                one_hot
            })
            .collect();
        let spec = EnvSpec {
            name,
            state_count,
            action_count,
            max_episode_steps: max_steps,
            discount_default: discount,
        };
        Self::new(spec, StateId(start), table, features)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn outcomes(&self, state: StateId, action: ActionId) -> &[Outcome] {
        &self.table[state.0 * self.spec.action_count + action.0]
    }

    pub fn is_absorbing(&self, state: StateId) -> bool {
        self.outcomes(state, ActionId(0)).is_empty()
    }

    pub fn current(&self) -> StateId {
        self.current
    }

    /// Teleports the environment into `state` with a fresh step counter.
    pub fn reset_to(&mut self, state: StateId) {
        self.current = state;
        self.steps = 0;
        self.done = self.is_absorbing(state);
    }
}

impl Environment for TabularMdp {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> StateId {
        self.reset_to(self.start);
        self.start
    }

    fn step(&mut self, action: ActionId, rng: &mut dyn RngCore) -> Result<StepResult> {
        if self.done {
            return Err(Error::StepAfterTerminal);
        }
        if action.0 >= self.spec.action_count {
            return Err(Error::InvalidAction {
                action: action.0,
                action_count: self.spec.action_count,
            });
        }
        let outcomes = self.outcomes(self.current, action);
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = &outcomes[outcomes.len() - 1];
        for o in outcomes {
            cumulative += o.probability;
            if u < cumulative {
                chosen = o;
                break;
            }
        }
        let absorbing = chosen.terminal || self.is_absorbing(chosen.next_state);
        let result = StepResult {
            next_state: chosen.next_state,
            reward: chosen.reward,
            terminal: false,
            truncated: false,
        };
        self.steps += 1;
        self.current = result.next_state;
        let capped = self.steps >= self.spec.max_episode_steps;
        self.done = absorbing || capped;
        Ok(StepResult {
            terminal: self.done,
            truncated: capped && !absorbing,
            ..result
        })
    }

    fn features(&self, state: StateId) -> &[f64] {
        &self.features[state.0]
    }
}
