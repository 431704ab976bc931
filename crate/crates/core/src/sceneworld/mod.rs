//! Synthetic scene/question environment.
//!
//! Scenes are short ordered lists of attributed objects standing in for an
//! image; problems are templated one- or two-hop questions with a unique
//! ground-truth answer recoverable through at most two queries from a
//! finite query vocabulary. The module also provides the answer oracle and
//! its noisy variant, caption templates, rationale-to-dialogue conversion,
//! gold trajectories, and an exact brute-force ceiling on achievable
//! accuracy.

mod ceiling;
mod problem;
mod query;
mod rationale;
mod types;

pub use ceiling::{brute_force_ceiling, CeilingReport, STRATEGY_EVAL_CAP};
pub use problem::{
    generate_problem, generate_problem_from, gold_trajectory, solvable_within_two_queries,
    GoldStep, Problem, TemplateId, ALL_TEMPLATES,
};
pub use query::{caption, noisy_answer, oracle_answer, AnswerToken, QueryAction, ANSWER_TOKENS};
pub use rationale::{convert_rationale, generate_rationale, GoldDialogue, RationaleRecord};
pub use types::{generate_scene, Color, ObjectSpec, Scene, Shape, Size};
