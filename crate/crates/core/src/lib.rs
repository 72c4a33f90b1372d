//! Two-memory reinforcement learning at desk scale.
//!
//! An agent alternates, episode by episode, between an episodic-control
//! memory ([`episodic::EcMemory`]) and a tabular Q-learner
//! ([`qlearning::QTable`]) that share one replay buffer. The [`harness`]
//! module runs seeded experiments and writes metrics and plots.

pub mod agent;
pub mod env;
pub mod episodic;
pub mod error;
pub mod harness;
pub mod qlearning;
pub mod replay;
pub mod schedule;

pub use agent::{AgentConfig, AgentMode, EpisodeOutcome, ScoreTracker, TwoMemoryAgent};
pub use env::{ActionId, EnvSpec, Environment, StateId, StepResult};
pub use episodic::{EcMemory, FeatureExtractor, FeatureKind};
pub use error::{Error, Result};
pub use qlearning::QTable;
pub use replay::{MemoryKind, ReplayBuffer, Transition};
pub use schedule::{Schedule, ScheduleKind};
