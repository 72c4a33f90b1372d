//! Non-parametric episodic control memory.
//!
//! Each (state, action) pair maps to the best discounted return observed
//! after taking that action in that state. Missing pairs are estimated by
//! averaging the `k` nearest stored states that have an entry for the same
//! action. When the table exceeds its capacity the least recently updated
//! entry is dropped.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::env::{ActionId, StateId};
use crate::error::{Error, Result};
use crate::replay::Transition;

/// Map from raw state features to the space the memory is keyed and searched in.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureExtractor {
    Identity,
    /// Rows of a fixed Gaussian matrix; the output has one coordinate per row.
    RandomProjection(Vec<Vec<f64>>),
}

/// Serializable description of a [`FeatureExtractor`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    #[default]
    Identity,
    RandomProjection {
        dim: usize,
        seed: u64,
    },
}

impl FeatureExtractor {
    pub fn random_projection(input_dim: usize, output_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrix = (0..output_dim)
            .map(|_| (0..input_dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        FeatureExtractor::RandomProjection(matrix)
    }

    pub fn from_kind(kind: FeatureKind, input_dim: usize) -> Self {
        match kind {
            FeatureKind::Identity => FeatureExtractor::Identity,
            FeatureKind::RandomProjection { dim, seed } => {
                Self::random_projection(input_dim, dim, seed)
            }
        }
    }

    pub fn project(&self, features: &[f64]) -> Vec<f64> {
        match self {
            FeatureExtractor::Identity => features.to_vec(),
            FeatureExtractor::RandomProjection(matrix) => matrix
                .iter()
                .map(|row| {
                    assert_eq!(row.len(), features.len(), "feature dimension mismatch");
                    row.iter().zip(features).map(|(w, x)| w * x).sum()
                })
                .collect(),
        }
    }
}

/// Exact-equality key over projected features.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(Box<[u64]>);

impl StateKey {
    fn new(projected: &[f64]) -> Self {
        // +0.0 and -0.0 are the same point
        StateKey(projected.iter().map(|&x| (x + 0.0).to_bits()).collect())
    }

    pub fn features(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|&b| f64::from_bits(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcEntry {
    pub best_return: f64,
    pub last_update_tick: u64,
    insertion: u64,
}

#[derive(Clone, Debug)]
struct KeyRecord {
    features: Vec<f64>,
    entries: Vec<Option<EcEntry>>,
}

#[derive(Clone, Debug)]
pub struct EcMemory {
    action_count: usize,
    capacity: usize,
    k: usize,
    tick: u64,
    insertions: u64,
    len: usize,
    extractor: FeatureExtractor,
    keys: IndexMap<StateKey, KeyRecord>,
    // (last_update_tick, insertion) -> entry; the first element is next to evict.
    recency: BTreeMap<(u64, u64), (StateKey, ActionId)>,
}

impl EcMemory {
    pub fn new(
        action_count: usize,
        capacity: usize,
        k: usize,
        extractor: FeatureExtractor,
    ) -> Self {
        assert!(action_count > 0 && capacity > 0 && k > 0);
        Self {
            action_count,
            capacity,
            k,
            tick: 0,
            insertions: 0,
            len: 0,
            extractor,
            keys: IndexMap::new(),
            recency: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    pub fn key_of(&self, features: &[f64]) -> StateKey {
        StateKey::new(&self.extractor.project(features))
    }

    pub fn entry(&self, features: &[f64], action: ActionId) -> Option<&EcEntry> {
        self.keys
            .get(&self.key_of(features))?
            .entries
            .get(action.0)?
            .as_ref()
    }

    /// Stored entries in eviction order (least recently updated first).
    pub fn entries(&self) -> impl Iterator<Item = (&StateKey, ActionId, &EcEntry)> {
        self.recency.values().map(|(key, action)| {
            let entry = self.keys[key].entries[action.0]
                .as_ref()
                .expect("indexed entry exists");
            (key, *action, entry)
        })
    }

    /// Folds one finished episode into the table.
    ///
    /// Returns are accumulated backward, `G_t = r_t + discount * G_{t+1}`.
    /// Absent pairs are inserted and present pairs keep the larger value.
    /// Every touched entry gets the tick of this update. Returns how many
    /// distinct entries were inserted or raised.
    pub fn update_from_episode<'f, F>(
        &mut self,
        trajectory: &[Transition],
        discount: f64,
        features: F,
    ) -> Result<usize>
    where
        F: Fn(StateId) -> &'f [f64],
    {
        if trajectory.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        assert!(
            discount > 0.0 && discount <= 1.0,
            "discount {discount} outside (0, 1]"
        );
        self.tick += 1;
        let mut changed: HashSet<(StateKey, ActionId)> = HashSet::new();
        let mut g = 0.0;
        for t in trajectory.iter().rev() {
            g = t.reward + discount * g;
            let projected = self.extractor.project(features(t.state));
            let key = StateKey::new(&projected);
            if self.write(key.clone(), projected, t.action, g) {
                changed.insert((key, t.action));
            }
        }
        Ok(changed.len())
    }

    fn write(&mut self, key: StateKey, projected: Vec<f64>, action: ActionId, value: f64) -> bool {
        assert!(action.0 < self.action_count);
        let tick = self.tick;
        let action_count = self.action_count;
        let record = self.keys.entry(key.clone()).or_insert_with(|| KeyRecord {
            features: projected,
            entries: vec![None; action_count],
        });
        let changed = match &mut record.entries[action.0] {
            Some(entry) => {
                self.recency
                    .remove(&(entry.last_update_tick, entry.insertion));
                entry.last_update_tick = tick;
                self.recency.insert((tick, entry.insertion), (key, action));
                if value > entry.best_return {
                    entry.best_return = value;
                    true
                } else {
                    false
                }
            }
            slot @ None => {
                let insertion = self.insertions;
                self.insertions += 1;
                *slot = Some(EcEntry {
                    best_return: value,
                    last_update_tick: tick,
                    insertion,
                });
                self.recency.insert((tick, insertion), (key, action));
                self.len += 1;
                true
            }
        };
        if self.len > self.capacity {
            self.evict_if_full();
        }
        changed
    }

    /// Drops the least recently updated entry if the table is over capacity.
    /// Ties on the tick go to the entry inserted first.
    pub fn evict_if_full(&mut self) -> Option<(StateKey, ActionId)> {
        if self.len <= self.capacity {
            return None;
        }
        let (_, (key, action)) = self.recency.pop_first()?;
        let record = self.keys.get_mut(&key).expect("indexed key exists");
        record.entries[action.0] = None;
        if record.entries.iter().all(Option::is_none) {
            self.keys.shift_remove(&key);
        }
        self.len -= 1;
        Some((key, action))
    }

    /// The stored value on an exact hit, otherwise the mean best return of
    /// the `k` nearest stored states holding an entry for `action`
    /// (Euclidean distance, ties to the earlier stored state).
    pub fn estimate_q(&self, features: &[f64], action: ActionId) -> Result<f64> {
        let projected = self.extractor.project(features);
        self.estimate_projected(&projected, action)
    }

    fn estimate_projected(&self, projected: &[f64], action: ActionId) -> Result<f64> {
        if let Some(entry) = self
            .keys
            .get(&StateKey::new(projected))
            .and_then(|r| r.entries[action.0].as_ref())
        {
            return Ok(entry.best_return);
        }
        let mut neighbours: Vec<(f64, f64)> = self
            .keys
            .values()
            .filter_map(|record| {
                let entry = record.entries[action.0].as_ref()?;
                let d2: f64 = record
                    .features
                    .iter()
                    .zip(projected)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                Some((d2, entry.best_return))
            })
            .collect();
        if neighbours.is_empty() {
            return Err(Error::NoEntries(action));
        }
        // stable sort keeps storage order among equal distances
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0));
        let take = neighbours.len().min(self.k);
        Ok(neighbours[..take].iter().map(|&(_, v)| v).sum::<f64>() / take as f64)
    }

    /// Greedy action over estimated values, lowest index on ties. Actions
    /// without any estimate lose to every estimated action; if none can be
    /// estimated the action is uniformly random.
    pub fn select_action(&self, features: &[f64], rng: &mut dyn RngCore) -> ActionId {
        let projected = self.extractor.project(features);
        let mut best: Option<(usize, f64)> = None;
        for a in 0..self.action_count {
            if let Ok(v) = self.estimate_projected(&projected, ActionId(a)) {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((a, v));
                }
            }
        }
        match best {
            Some((a, _)) => ActionId(a),
            None => ActionId(rng.random_range(0..self.action_count)),
        }
    }

    /// `key action best_return tick` lines in eviction order; the key is the
    /// comma-separated projected feature vector.
    pub fn snapshot(&self) -> String {
        let mut out = String::from("# key action best_return tick\n");
        for (key, action, entry) in self.entries() {
            let key: Vec<String> = key.features().map(|x| x.to_string()).collect();
            let _ = writeln!(
                out,
                "{} {} {} {}",
                key.join(","),
                action.0,
                entry.best_return,
                entry.last_update_tick
            );
        }
        out
    }
}
