//! Declarative rationales and their rule-based conversion into two-turn
//! gold dialogues.
//!
//! A rationale is exactly two sentences from a small declarative grammar.
//! Each sentence maps to one (query, answer) pair; the problem's ground
//! truth supplies the final answer.

use std::sync::LazyLock;

use rand::RngCore;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::problem::{gold_trajectory, GoldStep, Problem, TemplateId};
use super::query::{oracle_answer, AnswerToken, QueryAction};
use super::types::{Color, Scene, Shape};
use crate::error::{Error, Result};

/// Two (query, answer) pairs plus the final answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldDialogue {
    pub turns: Vec<(QueryAction, AnswerToken)>,
    pub final_answer: AnswerToken,
}

/// A problem with its declarative rationale and, once converted, the
/// dialogue form of that rationale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationaleRecord {
    pub problem: Problem,
    pub rationale: String,
    pub gold_dialogue: Option<GoldDialogue>,
}

/// Renders the declarative sentence stating that `query` answers `token`.
fn sentence(query: &QueryAction, token: AnswerToken) -> String {
    match query {
        QueryAction::AskColorOf { shape } => {
            format!("The {} is {}.", shape.as_str(), token.as_str())
        }
        QueryAction::AskSizeOf { shape } => {
            format!("The {} is {}.", shape.as_str(), token.as_str())
        }
        QueryAction::AskShapeOf { color } => {
            format!("The {} object is a {}.", color.as_str(), token.as_str())
        }
        QueryAction::AskLeftOf { shape } => format!(
            "The object left of the {} is the {}.",
            shape.as_str(),
            token.as_str()
        ),
        QueryAction::AskCount { shape } => {
            format!("There are {} {}s.", token.as_str(), shape.as_str())
        }
    }
}

/// Generates the rationale for a problem: the fact chain that solves it,
/// padded to two sentences for one-hop problems with a true side fact
/// about a different object.
pub fn generate_rationale(scene: &Scene, problem: &Problem, rng: &mut dyn RngCore) -> RationaleRecord {
    let gold = gold_trajectory(scene, problem);
    let mut sentences: Vec<String> = Vec::new();
    let mut queries: Vec<QueryAction> = Vec::new();
    let mut pending: Option<QueryAction> = None;
    for step in &gold {
        match step {
            GoldStep::Query { query } => pending = Some(*query),
            GoldStep::Answer { token } => {
                let q = pending.take().expect("answer follows query");
                sentences.push(sentence(&q, *token));
                queries.push(q);
            }
            GoldStep::Final { .. } => {}
        }
    }
    if sentences.len() == 1 {
        let side = side_fact(scene, problem, rng);
        sentences.push(sentence(&side, oracle_answer(scene, &side)));
    }
    RationaleRecord {
        problem: problem.clone(),
        rationale: sentences.join(" "),
        gold_dialogue: None,
    }
}

/// Picks a true side fact about an object other than the problem's
/// referent. Color and shape facts are preferred; a count fact is the
/// fallback.
fn side_fact(scene: &Scene, problem: &Problem, rng: &mut dyn RngCore) -> QueryAction {
    let referent: Vec<usize> = referent_positions(scene, problem);
    let mut candidates: Vec<QueryAction> = Vec::new();
    for shape in Shape::ALL {
        if let [only] = scene.with_shape(shape).as_slice() {
            if !referent.contains(&only.position) {
                candidates.push(QueryAction::AskColorOf { shape });
            }
        }
    }
    for color in Color::ALL {
        if let [only] = scene.with_color(color).as_slice() {
            if !referent.contains(&only.position) {
                candidates.push(QueryAction::AskShapeOf { color });
            }
        }
    }
    if candidates.is_empty() {
        for shape in Shape::ALL {
            if Some(shape) != problem.shape_slot() {
                candidates.push(QueryAction::AskCount { shape });
            }
        }
    }
    candidates[(rng.next_u64() % candidates.len() as u64) as usize]
}

fn referent_positions(scene: &Scene, problem: &Problem) -> Vec<usize> {
    match problem.template_id {
        TemplateId::ColorOfShape | TemplateId::SizeOfShape => problem
            .shape_slot()
            .map(|s| scene.with_shape(s).iter().map(|o| o.position).collect())
            .unwrap_or_default(),
        TemplateId::ShapeOfColor => problem
            .color_slot()
            .map(|c| scene.with_color(c).iter().map(|o| o.position).collect())
            .unwrap_or_default(),
        TemplateId::CountShape => problem
            .shape_slot()
            .map(|s| scene.with_shape(s).iter().map(|o| o.position).collect())
            .unwrap_or_default(),
        TemplateId::ColorOfLeftNeighbor | TemplateId::SizeOfLeftNeighbor => {
            let Some(shape) = problem.shape_slot() else {
                return Vec::new();
            };
            let mut v: Vec<usize> = scene.with_shape(shape).iter().map(|o| o.position).collect();
            if let [only] = scene.with_shape(shape).as_slice() {
                if only.position > 0 {
                    v.push(only.position - 1);
                }
            }
            v
        }
    }
}

static COLOR_FACT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^The (circle|square|triangle) is (red|blue|green)$").unwrap()
});
static SIZE_FACT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^The (circle|square|triangle) is (small|large)$").unwrap());
static SHAPE_FACT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^The (red|blue|green) object is a (circle|square|triangle)$").unwrap()
});
static LEFT_FACT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^The object left of the (circle|square|triangle) is the (circle|square|triangle)$")
        .unwrap()
});
static COUNT_FACT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^There are ([0-5]) (circle|square|triangle)s$").unwrap());

fn parse_sentence(text: &str) -> Option<(QueryAction, AnswerToken)> {
    if let Some(c) = COLOR_FACT.captures(text) {
        let shape = Shape::parse(&c[1])?;
        let color = Color::parse(&c[2])?;
        return Some((
            QueryAction::AskColorOf { shape },
            AnswerToken::from_color(color),
        ));
    }
    if let Some(c) = SIZE_FACT.captures(text) {
        let shape = Shape::parse(&c[1])?;
        let size = super::types::Size::parse(&c[2])?;
        return Some((
            QueryAction::AskSizeOf { shape },
            AnswerToken::from_size(size),
        ));
    }
    if let Some(c) = SHAPE_FACT.captures(text) {
        let color = Color::parse(&c[1])?;
        let shape = Shape::parse(&c[2])?;
        return Some((
            QueryAction::AskShapeOf { color },
            AnswerToken::from_shape(shape),
        ));
    }
    if let Some(c) = LEFT_FACT.captures(text) {
        let shape = Shape::parse(&c[1])?;
        let target = Shape::parse(&c[2])?;
        return Some((
            QueryAction::AskLeftOf { shape },
            AnswerToken::from_shape(target),
        ));
    }
    if let Some(c) = COUNT_FACT.captures(text) {
        let n: usize = c[1].parse().ok()?;
        let shape = Shape::parse(&c[2])?;
        return Some((
            QueryAction::AskCount { shape },
            AnswerToken::from_count(n),
        ));
    }
    None
}

/// Rule-based conversion of a declarative rationale into dialogue form:
/// exactly two (query, answer) pairs plus the problem's final answer.
pub fn convert_rationale(record: &RationaleRecord) -> Result<RationaleRecord> {
    let text = record.rationale.trim();
    if text.is_empty() {
        return Err(Error::UnparseableRationale(record.rationale.clone()));
    }
    let sentences: Vec<&str> = text
        .split('.')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if sentences.len() != 2 {
        return Err(Error::UnparseableRationale(record.rationale.clone()));
    }
    let mut turns = Vec::with_capacity(2);
    for s in sentences {
        let pair =
            parse_sentence(s).ok_or_else(|| Error::UnparseableRationale(record.rationale.clone()))?;
        turns.push(pair);
    }
    Ok(RationaleRecord {
        problem: record.problem.clone(),
        rationale: record.rationale.clone(),
        gold_dialogue: Some(GoldDialogue {
            turns,
            final_answer: record.problem.ground_truth,
        }),
    })
}

/// Replays a dialogue against the scene oracle; true iff every answer
/// matches.
pub fn dialogue_oracle_consistent(scene: &Scene, dialogue: &GoldDialogue) -> bool {
    dialogue
        .turns
        .iter()
        .all(|(q, a)| oracle_answer(scene, q) == *a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sceneworld::problem::generate_problem;
    use crate::sceneworld::types::generate_scene;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn spec_example_conversion() {
        let record = RationaleRecord {
            problem: Problem {
                template_id: TemplateId::ColorOfShape,
                slots: [("shape".to_string(), "square".to_string())].into(),
                surface: "What is the color of the square?".into(),
                ground_truth: AnswerToken::parse("blue").unwrap(),
                hops: 1,
            },
            rationale: "The square is blue. The object left of the circle is the square.".into(),
            gold_dialogue: None,
        };
        let converted = convert_rationale(&record).unwrap();
        let dialogue = converted.gold_dialogue.unwrap();
        assert_eq!(
            dialogue.turns[0],
            (
                QueryAction::AskColorOf { shape: Shape::Square },
                AnswerToken::parse("blue").unwrap()
            )
        );
        assert_eq!(
            dialogue.turns[1],
            (
                QueryAction::AskLeftOf { shape: Shape::Circle },
                AnswerToken::parse("square").unwrap()
            )
        );
        assert_eq!(dialogue.final_answer.as_str(), "blue");
    }

    #[test]
    fn empty_rationale_is_unparseable() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let scene = generate_scene(&mut rng, 2, 3).unwrap();
        let problem = generate_problem(&scene, &mut rng).unwrap();
        let record = RationaleRecord {
            problem,
            rationale: "".into(),
            gold_dialogue: None,
        };
        assert!(matches!(
            convert_rationale(&record),
            Err(Error::UnparseableRationale(_))
        ));
    }

    #[test]
    fn out_of_grammar_rationale_is_unparseable() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let scene = generate_scene(&mut rng, 2, 3).unwrap();
        let problem = generate_problem(&scene, &mut rng).unwrap();
        let record = RationaleRecord {
            problem,
            rationale: "The square is purple. The moon is cheese.".into(),
            gold_dialogue: None,
        };
        assert!(convert_rationale(&record).is_err());
    }

    #[test]
    fn generated_rationales_convert_and_replay() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut converted_count = 0;
        for _ in 0..500 {
            let scene = generate_scene(&mut rng, 2, 5).unwrap();
            let Ok(problem) = generate_problem(&scene, &mut rng) else {
                continue;
            };
            let record = generate_rationale(&scene, &problem, &mut rng);
            let converted = convert_rationale(&record).unwrap();
            let dialogue = converted.gold_dialogue.unwrap();
            assert_eq!(dialogue.turns.len(), 2);
            assert!(
                dialogue_oracle_consistent(&scene, &dialogue),
                "inconsistent dialogue for {record:?}"
            );
            assert_eq!(dialogue.final_answer, problem.ground_truth);
            converted_count += 1;
        }
        assert!(converted_count > 400);
    }
}
