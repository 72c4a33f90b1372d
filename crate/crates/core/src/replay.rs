//! FIFO experience replay with uniform sampling and per-source filtering.

use std::collections::VecDeque;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::env::{ActionId, StateId};

/// Which memory selected the actions of an episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MemoryKind {
    #[serde(rename = "EC")]
    Ec,
    #[serde(rename = "RL")]
    Rl,
}

impl MemoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MemoryKind::Ec => "EC",
            MemoryKind::Rl => "RL",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub next_state: StateId,
    /// `next_state` is absorbing; its value is never bootstrapped.
    pub terminal: bool,
    pub source: MemoryKind,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    storage: VecDeque<Transition>,
    capacity: usize,
    // Sequence number of `storage[0]`.
    front_seq: u64,
    // Sequence numbers of stored transitions, one queue per source.
    by_source: [VecDeque<u64>; 2],
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            storage: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
            front_seq: 0,
            by_source: [VecDeque::new(), VecDeque::new()],
        }
    }

    /// Appends `t`, dropping the oldest transition when full. Returns whether
    /// a transition was dropped.
    pub fn push(&mut self, t: Transition) -> bool {
        let seq = self.front_seq + self.storage.len() as u64;
        self.storage.push_back(t);
        self.by_source[t.source.slot()].push_back(seq);
        if self.storage.len() > self.capacity {
            let old = self.storage.pop_front().expect("non-empty");
            let popped = self.by_source[old.source.slot()].pop_front();
            debug_assert_eq!(popped, Some(self.front_seq));
            self.front_seq += 1;
            true
        } else {
            false
        }
    }

    /// Draws `n` transitions uniformly with replacement, optionally only from
    /// one source. Returns an empty batch when nothing is eligible.
    pub fn sample_uniform(
        &self,
        n: usize,
        rng: &mut dyn RngCore,
        source_filter: Option<MemoryKind>,
    ) -> Vec<Transition> {
        match source_filter {
            None => {
                if self.storage.is_empty() {
                    return Vec::new();
                }
                (0..n)
                    .map(|_| self.storage[rng.random_range(0..self.storage.len())])
                    .collect()
            }
            Some(kind) => {
                let seqs = &self.by_source[kind.slot()];
                if seqs.is_empty() {
                    return Vec::new();
                }
                (0..n)
                    .map(|_| {
                        let seq = seqs[rng.random_range(0..seqs.len())];
                        self.storage[(seq - self.front_seq) as usize]
                    })
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn count_from(&self, kind: MemoryKind) -> usize {
        self.by_source[kind.slot()].len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.storage.iter()
    }
}
