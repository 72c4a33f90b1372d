use serde::{Deserialize, Serialize};

use super::{ActionId, EnvSpec, Outcome, StateId, TabularMdp};

pub const UP: ActionId = ActionId(0);
pub const DOWN: ActionId = ActionId(1);
pub const LEFT: ActionId = ActionId(2);
pub const RIGHT: ActionId = ActionId(3);

const MOVES: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Which column decides whether a move is blown by the wind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindSemantics {
    /// The move lands in the wind column (the agent is blown while in it).
    Destination,
    /// The move starts in the wind column.
    Origin,
}

/// Geometry and reward structure of the windy grid.
///
/// Rows grow downward, so the wind pushes toward row 0. Moves are clipped at
/// the borders. The goal and the trap are absorbing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindyGridLayout {
    pub rows: usize,
    pub cols: usize,
    pub start: Cell,
    pub goal: Cell,
    pub trap: Cell,
    pub wind_column: usize,
    /// (probability, rows pushed upward).
    pub wind: Vec<(f64, usize)>,
    pub semantics: WindSemantics,
    pub step_reward: f64,
    pub goal_reward: f64,
    pub trap_reward: f64,
    pub max_episode_steps: usize,
}

impl Default for WindyGridLayout {
    fn default() -> Self {
        Self {
            rows: 7,
            cols: 10,
            start: Cell::new(3, 0),
            goal: Cell::new(3, 7),
            trap: Cell::new(4, 6),
            wind_column: 6,
            wind: vec![(0.8, 1), (0.1, 2), (0.1, 0)],
            semantics: WindSemantics::Destination,
            step_reward: -1.0,
            goal_reward: 0.0,
            trap_reward: -10.0,
            max_episode_steps: 200,
        }
    }
}

impl WindyGridLayout {
    pub fn state(&self, cell: Cell) -> StateId {
        assert!(
            cell.row < self.rows && cell.col < self.cols,
            "cell {cell:?} outside grid"
        );
        StateId(cell.row * self.cols + cell.col)
    }

    pub fn cell(&self, state: StateId) -> Cell {
        Cell::new(state.0 / self.cols, state.0 % self.cols)
    }

    fn outcomes(&self, from: Cell, action: ActionId) -> Vec<Outcome> {
        let (dr, dc) = MOVES[action.0];
        let row = (from.row as isize + dr).clamp(0, self.rows as isize - 1) as usize;
        let col = (from.col as isize + dc).clamp(0, self.cols as isize - 1) as usize;
        let windy = match self.semantics {
            WindSemantics::Destination => col == self.wind_column,
            WindSemantics::Origin => from.col == self.wind_column,
        };
        let pushes: &[(f64, usize)] = if windy { &self.wind } else { &[(1.0, 0)] };
        pushes
            .iter()
            .map(|&(probability, push)| {
                let landed = Cell::new(row.saturating_sub(push), col);
                let (reward, terminal) = if landed == self.goal {
                    (self.goal_reward, true)
                } else if landed == self.trap {
                    (self.trap_reward, true)
                } else {
                    (self.step_reward, false)
                };
                Outcome {
                    next_state: self.state(landed),
                    probability,
                    reward,
                    terminal,
                }
            })
            .collect()
    }

    pub fn build(&self) -> TabularMdp {
        let actions = MOVES.len();
        let mut table = Vec::with_capacity(self.rows * self.cols * actions);
        let mut features = Vec::with_capacity(self.rows * self.cols);
        for row in 0..self.rows {
            for col in 0..self.cols {
                let cell = Cell::new(row, col);
                let absorbing = cell == self.goal || cell == self.trap;
                for a in 0..actions {
                    table.push(if absorbing {
                        Vec::new()
                    } else {
                        self.outcomes(cell, ActionId(a))
                    });
                }
                features.push(vec![
                    row as f64 / (self.rows - 1).max(1) as f64,
                    col as f64 / (self.cols - 1).max(1) as f64,
                ]);
            }
        }
        let spec = EnvSpec {
            name: super::WINDY_GRID.to_string(),
            state_count: self.rows * self.cols,
            action_count: actions,
            max_episode_steps: self.max_episode_steps,
            discount_default: 1.0,
        };
        TabularMdp::new(spec, self.state(self.start), table, features)
            .expect("windy grid layout produces a valid table")
    }
}
