//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the protocol, environment, policies and training loop.
#[derive(Debug, Error)]
pub enum Error {
    /// An agent produced an utterance with empty text.
    #[error("agent produced an empty utterance")]
    EmptyUtterance,

    /// A policy reasoner's final action maps outside the problem's answer set.
    #[error("final answer {answer:?} is outside the answer vocabulary of template {template}")]
    AnswerOutOfVocabulary { answer: String, template: String },

    /// An agent call failed inside an episode; the turn index is attached.
    #[error("agent failure at turn {turn}: {source}")]
    AgentFailure {
        turn: usize,
        #[source]
        source: Box<Error>,
    },

    /// No problem template can be instantiated unambiguously on this scene.
    #[error("no valid problem template for scene {scene_id}")]
    NoValidProblem { scene_id: String },

    /// A rationale string does not follow the declarative grammar.
    #[error("unparseable rationale: {0:?}")]
    UnparseableRationale(String),

    /// Probability vectors of different lengths were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A stored sampling-time log-probability is not finite.
    #[error("non-finite probability ratio: stored log_prob {log_prob} at step {step}")]
    NonFiniteRatio { step: usize, log_prob: f64 },

    /// Behavior cloning was invoked with no examples.
    #[error("empty training dataset")]
    EmptyDataset,

    /// The brute-force ceiling search exceeded its evaluation budget.
    #[error("strategy search budget exceeded: {evaluated} > {cap}")]
    StrategyCapExceeded { evaluated: u64, cap: u64 },

    /// A remote agent timed out after exhausting its retries.
    #[error("remote endpoint timed out after {attempts} attempt(s): {detail}")]
    Timeout { attempts: u32, detail: String },

    /// Transport-level failure talking to a remote agent.
    #[error("remote transport error after {attempts} attempt(s): {detail}")]
    TransportError { attempts: u32, detail: String },

    /// The remote endpoint responded with a body we cannot interpret.
    #[error("malformed remote response: {0}")]
    MalformedResponse(String),

    /// Configuration rejected before any work started.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Training produced a non-finite loss or parameter.
    #[error("training diverged: {0}")]
    Divergence(String),

    /// A checkpoint or dataset file failed validation.
    #[error("validation failure: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an error with the episode turn at which it occurred.
    pub fn at_turn(self, turn: usize) -> Self {
        Error::AgentFailure {
            turn,
            source: Box::new(self),
        }
    }
}
