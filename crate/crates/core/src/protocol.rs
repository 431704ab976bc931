//! The inner-monologue state machine: caption initialization, the
//! query/answer turn loop, history accumulation and final-answer
//! elicitation.
//!
//! The observer is handed only the scene and the most recent query; the
//! reasoner is handed the problem plus the full monologue so far. Both
//! constraints are enforced structurally by the agent trait signatures in
//! [`crate::agents`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{ObserverAgent, ReasonerAgent};
use crate::error::{Error, Result};
use crate::policy::PolicyState;
use crate::sceneworld::{Problem, Scene};
use crate::training::RewardBreakdown;

/// Hard cap on the configurable turn budget.
pub const MAX_TURNS_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Observer,
    Reasoner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtteranceKind {
    Caption,
    Query,
    Answer,
    FinalAnswer,
}

/// One message in the monologue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: Speaker,
    pub kind: UtteranceKind,
    pub text: String,
    pub action_id: Option<u32>,
}

impl Utterance {
    /// Validates speaker/kind pairing and non-empty text.
    pub fn new(
        speaker: Speaker,
        kind: UtteranceKind,
        text: impl Into<String>,
        action_id: Option<u32>,
    ) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::EmptyUtterance);
        }
        let expected = match kind {
            UtteranceKind::Caption | UtteranceKind::Answer => Speaker::Observer,
            UtteranceKind::Query | UtteranceKind::FinalAnswer => Speaker::Reasoner,
        };
        if speaker != expected {
            return Err(Error::Validation(format!(
                "{kind:?} utterances must come from {expected:?}"
            )));
        }
        Ok(Self {
            speaker,
            kind,
            text,
            action_id,
        })
    }
}

/// The accumulated conversation: a caption followed by strictly
/// alternating query/answer pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerMonologue {
    entries: Vec<Utterance>,
}

impl InnerMonologue {
    pub fn from_caption(caption: Utterance) -> Result<Self> {
        if caption.kind != UtteranceKind::Caption {
            return Err(Error::Validation("monologue must start with a caption".into()));
        }
        Ok(Self {
            entries: vec![caption],
        })
    }

    /// Appends one completed turn.
    pub fn push_turn(&mut self, query: Utterance, answer: Utterance) -> Result<()> {
        if query.kind != UtteranceKind::Query || answer.kind != UtteranceKind::Answer {
            return Err(Error::Validation(
                "a turn is exactly one query followed by one answer".into(),
            ));
        }
        self.entries.push(query);
        self.entries.push(answer);
        Ok(())
    }

    pub fn entries(&self) -> &[Utterance] {
        &self.entries
    }

    pub fn caption(&self) -> &Utterance {
        &self.entries[0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of completed query/answer turns.
    pub fn completed_turns(&self) -> usize {
        (self.entries.len() - 1) / 2
    }

    /// The (query, answer) utterance pairs in order.
    pub fn turns(&self) -> impl Iterator<Item = (&Utterance, &Utterance)> {
        self.entries[1..]
            .chunks_exact(2)
            .map(|pair| (&pair[0], &pair[1]))
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() || self.entries[0].kind != UtteranceKind::Caption {
            return Err(Error::Validation("entries[0] must be a caption".into()));
        }
        if self.entries.len() % 2 == 0 {
            return Err(Error::Validation(
                "monologue length must be 1 + 2 * turns".into(),
            ));
        }
        for (i, pair) in self.entries[1..].chunks_exact(2).enumerate() {
            if pair[0].kind != UtteranceKind::Query || pair[1].kind != UtteranceKind::Answer {
                return Err(Error::Validation(format!(
                    "turn {i} is not a query/answer pair"
                )));
            }
        }
        for u in &self.entries {
            if u.text.trim().is_empty() {
                return Err(Error::EmptyUtterance);
            }
        }
        Ok(())
    }
}

/// Per-episode protocol settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub max_turns: usize,
    pub seed: u64,
}

impl EpisodeConfig {
    pub fn new(max_turns: usize, seed: u64) -> Result<Self> {
        if max_turns > MAX_TURNS_CAP {
            return Err(Error::InvalidConfig(format!(
                "max_turns {max_turns} exceeds cap {MAX_TURNS_CAP}"
            )));
        }
        Ok(Self { max_turns, seed })
    }
}

/// One agent decision inside an episode, as stored for training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub role: Speaker,
    /// Featurized decision state; absent for non-policy agents.
    pub state: Option<PolicyState>,
    pub action_id: Option<u32>,
    /// Log-probability at sampling time; absent for non-policy agents.
    pub log_prob: Option<f64>,
}

/// One full rollout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTranscript {
    pub scene_id: String,
    pub problem: Problem,
    pub im: InnerMonologue,
    pub final_answer: Utterance,
    pub ground_truth: String,
    pub reward: RewardBreakdown,
    pub steps: Vec<StepRecord>,
}

impl EpisodeTranscript {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }

    pub fn steps_for(&self, role: Speaker) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(move |s| s.role == role)
    }
}

/// Eq. caption initialization: the monologue starts as exactly the
/// observer's caption.
pub fn init_monologue(
    observer: &dyn ObserverAgent,
    scene: &Scene,
    rng: &mut dyn RngCore,
) -> Result<InnerMonologue> {
    let (im, _) = init_monologue_traced(observer, scene, rng)?;
    Ok(im)
}

fn init_monologue_traced(
    observer: &dyn ObserverAgent,
    scene: &Scene,
    rng: &mut dyn RngCore,
) -> Result<(InnerMonologue, StepRecord)> {
    let step = observer.caption(scene, rng).map_err(|e| e.at_turn(0))?;
    let record = StepRecord {
        role: Speaker::Observer,
        state: step.sample.as_ref().map(|s| s.state.clone()),
        action_id: step.sample.as_ref().map(|s| s.action_id),
        log_prob: step.sample.as_ref().map(|s| s.log_prob),
    };
    Ok((InnerMonologue::from_caption(step.utterance)?, record))
}

/// Runs one turn: the reasoner sees (problem, full monologue) and poses a
/// query; the observer sees (scene, that query) and answers; both are
/// appended.
pub fn run_turn(
    reasoner: &dyn ReasonerAgent,
    observer: &dyn ObserverAgent,
    problem: &Problem,
    scene: &Scene,
    im: InnerMonologue,
    rng: &mut dyn RngCore,
) -> Result<InnerMonologue> {
    let (im, _, _) = run_turn_traced(reasoner, observer, problem, scene, im, rng)?;
    Ok(im)
}

fn run_turn_traced(
    reasoner: &dyn ReasonerAgent,
    observer: &dyn ObserverAgent,
    problem: &Problem,
    scene: &Scene,
    mut im: InnerMonologue,
    rng: &mut dyn RngCore,
) -> Result<(InnerMonologue, StepRecord, StepRecord)> {
    let turn = im.completed_turns() + 1;
    let query_step = reasoner
        .next_query(problem, &im, rng)
        .map_err(|e| e.at_turn(turn))?;
    if query_step.utterance.kind != UtteranceKind::Query {
        return Err(Error::Validation("reasoner must produce a query".into()).at_turn(turn));
    }
    let answer_step = observer
        .answer(scene, &query_step.utterance, rng)
        .map_err(|e| e.at_turn(turn))?;
    if answer_step.utterance.kind != UtteranceKind::Answer {
        return Err(Error::Validation("observer must produce an answer".into()).at_turn(turn));
    }
    let reasoner_record = StepRecord {
        role: Speaker::Reasoner,
        state: query_step.sample.as_ref().map(|s| s.state.clone()),
        action_id: query_step.sample.as_ref().map(|s| s.action_id),
        log_prob: query_step.sample.as_ref().map(|s| s.log_prob),
    };
    let observer_record = StepRecord {
        role: Speaker::Observer,
        state: answer_step.sample.as_ref().map(|s| s.state.clone()),
        action_id: answer_step.sample.as_ref().map(|s| s.action_id),
        log_prob: answer_step.sample.as_ref().map(|s| s.log_prob),
    };
    im.push_turn(query_step.utterance, answer_step.utterance)?;
    Ok((im, reasoner_record, observer_record))
}

/// Elicits the final answer from the reasoner after the last turn.
pub fn finalize(
    reasoner: &dyn ReasonerAgent,
    problem: &Problem,
    im: &InnerMonologue,
    rng: &mut dyn RngCore,
) -> Result<Utterance> {
    let (utterance, _) = finalize_traced(reasoner, problem, im, rng)?;
    Ok(utterance)
}

fn finalize_traced(
    reasoner: &dyn ReasonerAgent,
    problem: &Problem,
    im: &InnerMonologue,
    rng: &mut dyn RngCore,
) -> Result<(Utterance, StepRecord)> {
    let turn = im.completed_turns() + 1;
    let step = reasoner
        .final_answer(problem, im, rng)
        .map_err(|e| e.at_turn(turn))?;
    if step.utterance.kind != UtteranceKind::FinalAnswer {
        return Err(Error::Validation("reasoner must produce a final answer".into()).at_turn(turn));
    }
    let record = StepRecord {
        role: Speaker::Reasoner,
        state: step.sample.as_ref().map(|s| s.state.clone()),
        action_id: step.sample.as_ref().map(|s| s.action_id),
        log_prob: step.sample.as_ref().map(|s| s.log_prob),
    };
    Ok((step.utterance, record))
}

/// Runs a full episode: caption, `max_turns` query/answer turns, final
/// answer, exact-match reward. Deterministic given the scene, problem,
/// seed and agent parameters. A failed agent call aborts the episode; no
/// transcript is emitted.
pub fn run_episode(
    reasoner: &dyn ReasonerAgent,
    observer: &dyn ObserverAgent,
    problem: &Problem,
    scene: &Scene,
    cfg: &EpisodeConfig,
) -> Result<EpisodeTranscript> {
    if cfg.max_turns > MAX_TURNS_CAP {
        return Err(Error::InvalidConfig(format!(
            "max_turns {} exceeds cap {MAX_TURNS_CAP}",
            cfg.max_turns
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut steps = Vec::with_capacity(2 * cfg.max_turns + 2);

    let (mut im, caption_record) = init_monologue_traced(observer, scene, &mut rng)?;
    steps.push(caption_record);

    for _ in 0..cfg.max_turns {
        let (next, reasoner_record, observer_record) =
            run_turn_traced(reasoner, observer, problem, scene, im, &mut rng)?;
        steps.push(reasoner_record);
        steps.push(observer_record);
        im = next;
    }

    let (final_answer, final_record) = finalize_traced(reasoner, problem, &im, &mut rng)?;
    steps.push(final_record);

    let r = crate::training::exact_match(&final_answer.text, problem.ground_truth.as_str());
    let reward = RewardBreakdown::new(r, 0.0, 0.0);

    let transcript = EpisodeTranscript {
        scene_id: scene.id.clone(),
        problem: problem.clone(),
        im,
        final_answer,
        ground_truth: problem.ground_truth.as_str().to_string(),
        reward,
        steps,
    };
    debug_assert_eq!(
        transcript.steps_for(Speaker::Reasoner).count(),
        cfg.max_turns + 1
    );
    debug_assert_eq!(
        transcript.steps_for(Speaker::Observer).count(),
        cfg.max_turns + 1
    );
    Ok(transcript)
}
