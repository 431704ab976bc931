//! Problem templates, instantiation, gold trajectories and the
//! two-query solvability check.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::query::{oracle_answer, AnswerToken, QueryAction};
use super::types::{Color, Scene, Shape};
use crate::error::{Error, Result};

/// The six question templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    ColorOfShape,
    ShapeOfColor,
    SizeOfShape,
    CountShape,
    ColorOfLeftNeighbor,
    SizeOfLeftNeighbor,
}

pub const ALL_TEMPLATES: [TemplateId; 6] = [
    TemplateId::ColorOfShape,
    TemplateId::ShapeOfColor,
    TemplateId::SizeOfShape,
    TemplateId::CountShape,
    TemplateId::ColorOfLeftNeighbor,
    TemplateId::SizeOfLeftNeighbor,
];

impl TemplateId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemplateId::ColorOfShape => "color_of_shape",
            TemplateId::ShapeOfColor => "shape_of_color",
            TemplateId::SizeOfShape => "size_of_shape",
            TemplateId::CountShape => "count_shape",
            TemplateId::ColorOfLeftNeighbor => "color_of_left_neighbor",
            TemplateId::SizeOfLeftNeighbor => "size_of_left_neighbor",
        }
    }

    pub fn index(&self) -> usize {
        ALL_TEMPLATES.iter().position(|t| t == self).unwrap()
    }

    pub fn hops(&self) -> usize {
        match self {
            TemplateId::ColorOfLeftNeighbor | TemplateId::SizeOfLeftNeighbor => 2,
            _ => 1,
        }
    }

    /// The answer vocabulary a final answer for this template is drawn from.
    pub fn answer_vocab(&self) -> Vec<AnswerToken> {
        match self {
            TemplateId::ColorOfShape | TemplateId::ColorOfLeftNeighbor => {
                Color::ALL.iter().map(|c| AnswerToken::from_color(*c)).collect()
            }
            TemplateId::ShapeOfColor => {
                Shape::ALL.iter().map(|s| AnswerToken::from_shape(*s)).collect()
            }
            TemplateId::SizeOfShape | TemplateId::SizeOfLeftNeighbor => {
                super::types::Size::ALL.iter().map(|s| AnswerToken::from_size(*s)).collect()
            }
            TemplateId::CountShape => (0..=5).map(AnswerToken::from_count).collect(),
        }
    }
}

/// A templated question about a scene with its unique ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub template_id: TemplateId,
    /// Filler tokens, keyed by slot name ("shape" or "color").
    pub slots: BTreeMap<String, String>,
    pub surface: String,
    pub ground_truth: AnswerToken,
    pub hops: usize,
}

impl Problem {
    pub fn shape_slot(&self) -> Option<Shape> {
        self.slots.get("shape").and_then(|s| Shape::parse(s))
    }

    pub fn color_slot(&self) -> Option<Color> {
        self.slots.get("color").and_then(|c| Color::parse(c))
    }
}

/// Every valid instantiation of one template on a scene.
fn instantiations(scene: &Scene, template: TemplateId) -> Vec<Problem> {
    let mut out = Vec::new();
    match template {
        TemplateId::ColorOfShape => {
            for shape in Shape::ALL {
                if let [only] = scene.with_shape(shape).as_slice() {
                    out.push(build(
                        template,
                        [("shape", shape.as_str())],
                        format!("What is the color of the {}?", shape.as_str()),
                        AnswerToken::from_color(only.color),
                    ));
                }
            }
        }
        TemplateId::ShapeOfColor => {
            for color in Color::ALL {
                if let [only] = scene.with_color(color).as_slice() {
                    out.push(build(
                        template,
                        [("color", color.as_str())],
                        format!("What is the shape of the {} object?", color.as_str()),
                        AnswerToken::from_shape(only.shape),
                    ));
                }
            }
        }
        TemplateId::SizeOfShape => {
            for shape in Shape::ALL {
                if let [only] = scene.with_shape(shape).as_slice() {
                    out.push(build(
                        template,
                        [("shape", shape.as_str())],
                        format!("What is the size of the {}?", shape.as_str()),
                        AnswerToken::from_size(only.size),
                    ));
                }
            }
        }
        TemplateId::CountShape => {
            for shape in Shape::ALL {
                let n = scene.with_shape(shape).len();
                out.push(build(
                    template,
                    [("shape", shape.as_str())],
                    format!("How many {}s are there?", shape.as_str()),
                    AnswerToken::from_count(n),
                ));
            }
        }
        TemplateId::ColorOfLeftNeighbor | TemplateId::SizeOfLeftNeighbor => {
            for shape in Shape::ALL {
                let [only] = scene.with_shape(shape).as_slice() else {
                    continue;
                };
                if only.position == 0 {
                    continue;
                }
                let neighbor = &scene.objects[only.position - 1];
                // The two-query plan asks the neighbor's shape and then an
                // attribute of that shape, so the neighbor's shape must be
                // unique in the scene.
                if scene.with_shape(neighbor.shape).len() != 1 {
                    continue;
                }
                let (surface, truth) = match template {
                    TemplateId::ColorOfLeftNeighbor => (
                        format!("What is the color of the object left of the {}?", shape.as_str()),
                        AnswerToken::from_color(neighbor.color),
                    ),
                    _ => (
                        format!("What is the size of the object left of the {}?", shape.as_str()),
                        AnswerToken::from_size(neighbor.size),
                    ),
                };
                out.push(build(template, [("shape", shape.as_str())], surface, truth));
            }
        }
    }
    out
}

fn build<'a>(
    template: TemplateId,
    slots: impl IntoIterator<Item = (&'a str, &'a str)>,
    surface: String,
    ground_truth: AnswerToken,
) -> Problem {
    Problem {
        template_id: template,
        slots: slots
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        surface,
        ground_truth,
        hops: template.hops(),
    }
}

/// Samples a problem for the scene: a template is drawn uniformly among
/// those with at least one valid instantiation, then an instantiation is
/// drawn uniformly within it.
pub fn generate_problem(scene: &Scene, rng: &mut dyn RngCore) -> Result<Problem> {
    generate_problem_from(scene, &ALL_TEMPLATES, rng)
}

/// Same as [`generate_problem`] restricted to a template subset.
pub fn generate_problem_from(
    scene: &Scene,
    templates: &[TemplateId],
    rng: &mut dyn RngCore,
) -> Result<Problem> {
    let candidates: Vec<Vec<Problem>> = templates
        .iter()
        .map(|t| instantiations(scene, *t))
        .filter(|v| !v.is_empty())
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoValidProblem {
            scene_id: scene.id.clone(),
        });
    }
    let group = &candidates[(rng.next_u64() % candidates.len() as u64) as usize];
    Ok(group[(rng.next_u64() % group.len() as u64) as usize].clone())
}

/// One step of a gold trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum GoldStep {
    /// Reasoner poses this query.
    Query { query: QueryAction },
    /// Observer answers the preceding query.
    Answer { token: AnswerToken },
    /// Reasoner commits to the final answer.
    Final { token: AnswerToken },
}

/// The minimal query sequence (length = hops) that determines the ground
/// truth, interleaved with the oracle's answers and terminated by the
/// correct final answer.
pub fn gold_trajectory(scene: &Scene, problem: &Problem) -> Vec<GoldStep> {
    let mut steps = Vec::new();
    let mut push_qa = |steps: &mut Vec<GoldStep>, query: QueryAction| {
        let token = oracle_answer(scene, &query);
        steps.push(GoldStep::Query { query });
        steps.push(GoldStep::Answer { token });
        token
    };
    match problem.template_id {
        TemplateId::ColorOfShape => {
            let shape = problem.shape_slot().expect("shape slot");
            push_qa(&mut steps, QueryAction::AskColorOf { shape });
        }
        TemplateId::ShapeOfColor => {
            let color = problem.color_slot().expect("color slot");
            push_qa(&mut steps, QueryAction::AskShapeOf { color });
        }
        TemplateId::SizeOfShape => {
            let shape = problem.shape_slot().expect("shape slot");
            push_qa(&mut steps, QueryAction::AskSizeOf { shape });
        }
        TemplateId::CountShape => {
            let shape = problem.shape_slot().expect("shape slot");
            push_qa(&mut steps, QueryAction::AskCount { shape });
        }
        TemplateId::ColorOfLeftNeighbor | TemplateId::SizeOfLeftNeighbor => {
            let shape = problem.shape_slot().expect("shape slot");
            let neighbor = push_qa(&mut steps, QueryAction::AskLeftOf { shape });
            let neighbor_shape =
                Shape::parse(neighbor.as_str()).expect("left-of answer is a shape");
            let second = match problem.template_id {
                TemplateId::ColorOfLeftNeighbor => QueryAction::AskColorOf { shape: neighbor_shape },
                _ => QueryAction::AskSizeOf { shape: neighbor_shape },
            };
            push_qa(&mut steps, second);
        }
    }
    steps.push(GoldStep::Final {
        token: problem.ground_truth,
    });
    steps
}

/// Replays the gold trajectory under the noiseless oracle and checks the
/// final answer matches the ground truth, i.e. the problem is solvable
/// with at most two queries.
pub fn solvable_within_two_queries(scene: &Scene, problem: &Problem) -> bool {
    let steps = gold_trajectory(scene, problem);
    let queries: Vec<QueryAction> = steps
        .iter()
        .filter_map(|s| match s {
            GoldStep::Query { query } => Some(*query),
            _ => None,
        })
        .collect();
    if queries.len() > 2 || queries.len() != problem.hops {
        return false;
    }
    for step in &steps {
        if let GoldStep::Answer { token } = step {
            // Every recorded answer must be oracle-consistent.
            let q = queries
                .iter()
                .find(|q| oracle_answer(scene, q) == *token);
            if q.is_none() {
                return false;
            }
        }
    }
    // The last answer token carries the ground truth for every template.
    let last_answer = steps.iter().rev().find_map(|s| match s {
        GoldStep::Answer { token } => Some(*token),
        _ => None,
    });
    last_answer == Some(problem.ground_truth)
}
