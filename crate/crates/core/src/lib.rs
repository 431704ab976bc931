//! Two-agent dialogue framework: a Reasoner asks questions, an Observer
//! answers them from a scene, and the pair is trained end to end with
//! behavior cloning followed by alternating-role PPO.
//!
//! The crate is organized around six modules:
//!
//! - [`protocol`] — the turn-taking state machine (caption, query/answer
//!   turns, final answer) and episode transcripts.
//! - [`sceneworld`] — the synthetic scene/question environment, its answer
//!   oracle, rationale-to-dialogue conversion, and the brute-force
//!   optimal-strategy ceiling.
//! - [`agents`] — agent traits plus oracle, scripted, policy-backed, noisy
//!   and remote-endpoint implementations, and the state featurizers.
//! - [`policy`] — discrete softmax policies (tabular or linear) with exact
//!   log-probabilities, analytic gradients, KL divergence and snapshots.
//! - [`training`] — behavior cloning and the alternating PPO loop with
//!   exact-match reward and KL anchoring.
//! - [`dataset`] / [`eval`] — JSONL dataset IO, evaluation reports and the
//!   turn-count ablation harness used by the CLI.

pub mod agents;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod policy;
pub mod protocol;
pub mod sceneworld;
pub mod training;

pub use error::{Error, Result};
pub use policy::{ActionSpace, PolicySnapshot, PolicyState, SoftmaxPolicy};
pub use protocol::{EpisodeConfig, EpisodeTranscript, InnerMonologue, Utterance};
pub use sceneworld::{Problem, QueryAction, Scene};
pub use training::{RewardBreakdown, RlConfig, SlConfig};
