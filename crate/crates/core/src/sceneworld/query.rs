//! Query vocabulary, answer tokens, the answer oracle and the caption
//! template.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::types::{Color, Scene, Shape, Size};
use crate::error::{Error, Result};

/// Every answer token any query or problem can use, in canonical order.
pub const ANSWER_TOKENS: [&str; 15] = [
    "red", "blue", "green", "circle", "square", "triangle", "small", "large", "none", "0", "1",
    "2", "3", "4", "5",
];

/// One of the fifteen canonical answer tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnswerToken(u8);

impl AnswerToken {
    pub const NONE: AnswerToken = AnswerToken(8);

    pub fn from_index(index: usize) -> Option<Self> {
        (index < ANSWER_TOKENS.len()).then_some(Self(index as u8))
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn as_str(&self) -> &'static str {
        ANSWER_TOKENS[self.0 as usize]
    }

    /// Parses a token after lowercasing and trimming.
    pub fn parse(text: &str) -> Option<Self> {
        let norm = text.trim().to_lowercase();
        ANSWER_TOKENS
            .iter()
            .position(|t| *t == norm)
            .map(|i| Self(i as u8))
    }

    pub fn from_color(c: Color) -> Self {
        Self(c.index() as u8)
    }

    pub fn from_shape(s: Shape) -> Self {
        Self(3 + s.index() as u8)
    }

    pub fn from_size(s: Size) -> Self {
        Self(6 + s.index() as u8)
    }

    pub fn from_count(n: usize) -> Self {
        debug_assert!(n <= 5);
        Self(9 + n as u8)
    }
}

impl std::fmt::Display for AnswerToken {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for AnswerToken {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for AnswerToken {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        AnswerToken::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown answer token {s:?}")))
    }
}

/// A discrete information query the reasoner can pose to the observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryAction {
    AskColorOf { shape: Shape },
    AskShapeOf { color: Color },
    AskLeftOf { shape: Shape },
    AskSizeOf { shape: Shape },
    AskCount { shape: Shape },
}

impl QueryAction {
    /// The full query vocabulary: five kinds times three slot fillers.
    pub fn all() -> Vec<QueryAction> {
        let mut v = Vec::with_capacity(15);
        for s in Shape::ALL {
            v.push(QueryAction::AskColorOf { shape: s });
        }
        for c in Color::ALL {
            v.push(QueryAction::AskShapeOf { color: c });
        }
        for s in Shape::ALL {
            v.push(QueryAction::AskLeftOf { shape: s });
        }
        for s in Shape::ALL {
            v.push(QueryAction::AskSizeOf { shape: s });
        }
        for s in Shape::ALL {
            v.push(QueryAction::AskCount { shape: s });
        }
        v
    }

    /// Index of this query in [`QueryAction::all`].
    pub fn index(&self) -> usize {
        match self {
            QueryAction::AskColorOf { shape } => shape.index(),
            QueryAction::AskShapeOf { color } => 3 + color.index(),
            QueryAction::AskLeftOf { shape } => 6 + shape.index(),
            QueryAction::AskSizeOf { shape } => 9 + shape.index(),
            QueryAction::AskCount { shape } => 12 + shape.index(),
        }
    }

    pub fn from_index(index: usize) -> Option<QueryAction> {
        QueryAction::all().get(index).copied()
    }

    /// Kind discriminant (0..5), ignoring the slot filler.
    pub fn kind_index(&self) -> usize {
        match self {
            QueryAction::AskColorOf { .. } => 0,
            QueryAction::AskShapeOf { .. } => 1,
            QueryAction::AskLeftOf { .. } => 2,
            QueryAction::AskSizeOf { .. } => 3,
            QueryAction::AskCount { .. } => 4,
        }
    }

    /// The rendered question string.
    pub fn surface(&self) -> String {
        match self {
            QueryAction::AskColorOf { shape } => {
                format!("What is the color of the {}?", shape.as_str())
            }
            QueryAction::AskShapeOf { color } => {
                format!("What is the shape of the {} object?", color.as_str())
            }
            QueryAction::AskLeftOf { shape } => {
                format!("What is the object left of the {}?", shape.as_str())
            }
            QueryAction::AskSizeOf { shape } => {
                format!("What is the size of the {}?", shape.as_str())
            }
            QueryAction::AskCount { shape } => {
                format!("How many {}s are there?", shape.as_str())
            }
        }
    }

    /// Parses a canonical query surface back into the action.
    pub fn parse_surface(text: &str) -> Option<QueryAction> {
        QueryAction::all()
            .into_iter()
            .find(|q| q.surface() == text.trim())
    }

    /// The fixed answer vocabulary of this query kind.
    pub fn answer_vocab(&self) -> Vec<AnswerToken> {
        match self {
            QueryAction::AskColorOf { .. } => Color::ALL
                .iter()
                .map(|c| AnswerToken::from_color(*c))
                .chain([AnswerToken::NONE])
                .collect(),
            QueryAction::AskShapeOf { .. } | QueryAction::AskLeftOf { .. } => Shape::ALL
                .iter()
                .map(|s| AnswerToken::from_shape(*s))
                .chain([AnswerToken::NONE])
                .collect(),
            QueryAction::AskSizeOf { .. } => Size::ALL
                .iter()
                .map(|s| AnswerToken::from_size(*s))
                .chain([AnswerToken::NONE])
                .collect(),
            QueryAction::AskCount { .. } => (0..=5).map(AnswerToken::from_count).collect(),
        }
    }
}

/// Ground-truth answer to a query. Queries whose referent is missing or
/// ambiguous answer `none`.
pub fn oracle_answer(scene: &Scene, query: &QueryAction) -> AnswerToken {
    match query {
        QueryAction::AskColorOf { shape } => match scene.with_shape(*shape).as_slice() {
            [only] => AnswerToken::from_color(only.color),
            _ => AnswerToken::NONE,
        },
        QueryAction::AskShapeOf { color } => match scene.with_color(*color).as_slice() {
            [only] => AnswerToken::from_shape(only.shape),
            _ => AnswerToken::NONE,
        },
        QueryAction::AskLeftOf { shape } => match scene.with_shape(*shape).as_slice() {
            [only] if only.position > 0 => {
                AnswerToken::from_shape(scene.objects[only.position - 1].shape)
            }
            _ => AnswerToken::NONE,
        },
        QueryAction::AskSizeOf { shape } => match scene.with_shape(*shape).as_slice() {
            [only] => AnswerToken::from_size(only.size),
            _ => AnswerToken::NONE,
        },
        QueryAction::AskCount { shape } => AnswerToken::from_count(scene.with_shape(*shape).len()),
    }
}

/// Oracle answer corrupted with probability `epsilon` into a uniformly
/// random *wrong* token from the query's answer vocabulary.
pub fn noisy_answer(
    scene: &Scene,
    query: &QueryAction,
    epsilon: f64,
    rng: &mut dyn RngCore,
) -> Result<AnswerToken> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be in [0, 1], got {epsilon}"
        )));
    }
    let truth = oracle_answer(scene, query);
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    if u >= epsilon {
        return Ok(truth);
    }
    let wrong: Vec<AnswerToken> = query
        .answer_vocab()
        .into_iter()
        .filter(|t| *t != truth)
        .collect();
    Ok(wrong[(rng.next_u64() % wrong.len() as u64) as usize])
}

/// Deliberately incomplete scene description: the object count plus the
/// color and shape of the leftmost object only.
pub fn caption(scene: &Scene) -> String {
    let first = &scene.objects[0];
    format!(
        "a scene with {} objects including a {} {}",
        scene.len(),
        first.color.as_str(),
        first.shape.as_str()
    )
}

/// Parses a caption produced by [`caption`] back into
/// `(object count, first color, first shape)`.
pub fn parse_caption(text: &str) -> Option<(usize, Color, Shape)> {
    let rest = text.strip_prefix("a scene with ")?;
    let (n_str, rest) = rest.split_once(" objects including a ")?;
    let n: usize = n_str.parse().ok()?;
    let (color_str, shape_str) = rest.trim().split_once(' ')?;
    Some((n, Color::parse(color_str)?, Shape::parse(shape_str)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sceneworld::types::ObjectSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    pub(crate) fn two_object_scene() -> Scene {
        // blue square at 0, red circle at 1
        Scene::new(vec![
            ObjectSpec {
                shape: Shape::Square,
                color: Color::Blue,
                size: Size::Small,
                position: 0,
            },
            ObjectSpec {
                shape: Shape::Circle,
                color: Color::Red,
                size: Size::Large,
                position: 1,
            },
        ])
        .unwrap()
    }

    #[test]
    fn oracle_answers_forced_by_scene() {
        let scene = two_object_scene();
        assert_eq!(
            oracle_answer(&scene, &QueryAction::AskColorOf { shape: Shape::Square }).as_str(),
            "blue"
        );
        assert_eq!(
            oracle_answer(&scene, &QueryAction::AskLeftOf { shape: Shape::Circle }).as_str(),
            "square"
        );
        assert_eq!(
            oracle_answer(&scene, &QueryAction::AskColorOf { shape: Shape::Triangle }).as_str(),
            "none"
        );
    }

    #[test]
    fn ambiguous_referent_answers_none() {
        let scene = Scene::new(vec![
            ObjectSpec {
                shape: Shape::Square,
                color: Color::Blue,
                size: Size::Small,
                position: 0,
            },
            ObjectSpec {
                shape: Shape::Square,
                color: Color::Red,
                size: Size::Large,
                position: 1,
            },
        ])
        .unwrap();
        assert_eq!(
            oracle_answer(&scene, &QueryAction::AskColorOf { shape: Shape::Square }),
            AnswerToken::NONE
        );
        assert_eq!(
            oracle_answer(&scene, &QueryAction::AskCount { shape: Shape::Square }).as_str(),
            "2"
        );
    }

    #[test]
    fn noisy_answer_degenerate_epsilons() {
        let scene = two_object_scene();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let q = QueryAction::AskColorOf { shape: Shape::Square };
        let truth = oracle_answer(&scene, &q);
        for _ in 0..200 {
            assert_eq!(noisy_answer(&scene, &q, 0.0, &mut rng).unwrap(), truth);
            assert_ne!(noisy_answer(&scene, &q, 1.0, &mut rng).unwrap(), truth);
        }
    }

    #[test]
    fn noisy_answer_error_rate_matches_epsilon() {
        let scene = two_object_scene();
        let q = QueryAction::AskCount { shape: Shape::Circle };
        let truth = oracle_answer(&scene, &q);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 10_000;
        let mut errors = 0;
        for _ in 0..n {
            if noisy_answer(&scene, &q, 0.3, &mut rng).unwrap() != truth {
                errors += 1;
            }
        }
        let rate = errors as f64 / n as f64;
        assert!((rate - 0.30).abs() < 0.015, "error rate {rate}");
    }

    #[test]
    fn caption_template_and_parse() {
        let scene = two_object_scene();
        let text = caption(&scene);
        assert_eq!(text, "a scene with 2 objects including a blue square");
        assert_eq!(
            parse_caption(&text),
            Some((2, Color::Blue, Shape::Square))
        );
    }

    #[test]
    fn caption_ignores_noise_settings() {
        // Noise applies only to query answers; the caption is a pure function.
        let scene = two_object_scene();
        assert_eq!(caption(&scene), caption(&scene));
    }

    #[test]
    fn query_indices_round_trip() {
        for (i, q) in QueryAction::all().into_iter().enumerate() {
            assert_eq!(q.index(), i);
            assert_eq!(QueryAction::from_index(i), Some(q));
            assert_eq!(QueryAction::parse_surface(&q.surface()), Some(q));
        }
    }

    #[test]
    fn answer_token_parse_normalizes() {
        assert_eq!(AnswerToken::parse("  Blue "), AnswerToken::parse("blue"));
        assert_eq!(AnswerToken::parse("7"), None);
    }
}
