//! Agent abstraction and implementations.
//!
//! The two traits encode the visibility contract structurally: an observer
//! can only ever see the scene and the single query it is answering, and a
//! reasoner can only ever see the problem and the monologue history.

mod features;
mod oracle;
mod policy_agent;
mod remote;

pub use features::{
    featurize_observer_state, featurize_reasoner_state, observer_action_space,
    observer_policy_state, reasoner_action_space, reasoner_policy_state, ReasonerMode,
    OBSERVER_FEATURE_DIM, REASONER_ANSWER_BASE, REASONER_FEATURE_DIM,
};
pub use oracle::{GoldReasoner, NoisyObserver, OracleObserver, ScriptedReasoner, SpyObserver, SpyReasoner};
pub use policy_agent::{PolicyObserver, PolicyReasoner};
pub use remote::{remote_call, AgentRole, RemoteEndpointConfig, RemoteObserver, RemoteReasoner, RemoteRequest, RemoteResponse};

use rand::RngCore;

use crate::error::Result;
use crate::policy::PolicyState;
use crate::protocol::Utterance;
use crate::sceneworld::{InnerScene, Problem};

// `InnerScene` is a deliberate re-export alias so the trait signatures read
// against the sceneworld type without a glob import.
pub(crate) use crate::sceneworld::Scene as InnerSceneAlias;

/// Sampling details attached to a policy-backed utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledInfo {
    pub state: PolicyState,
    pub action_id: u32,
    pub log_prob: f64,
}

/// An agent's reply: the utterance plus, for policy agents, the sampled
/// decision behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStep {
    pub utterance: Utterance,
    pub sample: Option<SampledInfo>,
}

impl AgentStep {
    pub fn plain(utterance: Utterance) -> Self {
        Self {
            utterance,
            sample: None,
        }
    }
}

/// Perceives the scene. `answer` receives only the current query, never
/// any prior turn.
pub trait ObserverAgent {
    fn caption(&self, scene: &InnerScene, rng: &mut dyn RngCore) -> Result<AgentStep>;
    fn answer(&self, scene: &InnerScene, query: &Utterance, rng: &mut dyn RngCore)
        -> Result<AgentStep>;
}

/// Poses queries and commits to a final answer from the problem plus the
/// full monologue.
pub trait ReasonerAgent {
    fn next_query(
        &self,
        problem: &Problem,
        im: &crate::protocol::InnerMonologue,
        rng: &mut dyn RngCore,
    ) -> Result<AgentStep>;
    fn final_answer(
        &self,
        problem: &Problem,
        im: &crate::protocol::InnerMonologue,
        rng: &mut dyn RngCore,
    ) -> Result<AgentStep>;
}
