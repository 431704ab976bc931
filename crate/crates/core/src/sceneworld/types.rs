//! Scene objects and scene generation.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Circle, Shape::Square, Shape::Triangle];

    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
            Shape::Triangle => "triangle",
        }
    }

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|s| s == self).unwrap()
    }

    pub fn parse(s: &str) -> Option<Shape> {
        Self::ALL.iter().copied().find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
    Green,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Blue, Color::Green];

    pub fn as_str(&self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
            Color::Green => "green",
        }
    }

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|c| c == self).unwrap()
    }

    pub fn parse(s: &str) -> Option<Color> {
        Self::ALL.iter().copied().find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Size {
    Small,
    Large,
}

impl Size {
    pub const ALL: [Size; 2] = [Size::Small, Size::Large];

    pub fn as_str(&self) -> &'static str {
        match self {
            Size::Small => "small",
            Size::Large => "large",
        }
    }

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|s| s == self).unwrap()
    }

    pub fn parse(s: &str) -> Option<Size> {
        Self::ALL.iter().copied().find(|x| x.as_str() == s)
    }
}

/// One object in a scene. `position` is the left-to-right index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub shape: Shape,
    pub color: Color,
    pub size: Size,
    pub position: usize,
}

/// An ordered scene of 2 to 5 objects; positions form `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    pub objects: Vec<ObjectSpec>,
}

pub const MIN_OBJECTS: usize = 2;
pub const MAX_OBJECTS: usize = 5;

impl Scene {
    /// Builds a scene from objects, assigning a content-derived id.
    pub fn new(objects: Vec<ObjectSpec>) -> Result<Self> {
        if objects.len() < MIN_OBJECTS || objects.len() > MAX_OBJECTS {
            return Err(Error::Validation(format!(
                "scene must have {MIN_OBJECTS}..={MAX_OBJECTS} objects, got {}",
                objects.len()
            )));
        }
        for (i, o) in objects.iter().enumerate() {
            if o.position != i {
                return Err(Error::Validation(format!(
                    "object positions must form 0..n-1, found {} at index {i}",
                    o.position
                )));
            }
        }
        let id = content_id(&objects);
        Ok(Self { id, objects })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Objects of a given shape, in position order.
    pub fn with_shape(&self, shape: Shape) -> Vec<&ObjectSpec> {
        self.objects.iter().filter(|o| o.shape == shape).collect()
    }

    /// Objects of a given color, in position order.
    pub fn with_color(&self, color: Color) -> Vec<&ObjectSpec> {
        self.objects.iter().filter(|o| o.color == color).collect()
    }
}

fn content_id(objects: &[ObjectSpec]) -> String {
    let bytes = serde_json::to_vec(objects).expect("objects serialize");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    format!("s{}", &hex::encode(hasher.finalize())[..12])
}

/// Draws a scene with a uniform object count in `[min_objects, max_objects]`
/// and uniform independent attributes per position.
pub fn generate_scene(
    rng: &mut dyn RngCore,
    min_objects: usize,
    max_objects: usize,
) -> Result<Scene> {
    if min_objects < MIN_OBJECTS || max_objects > MAX_OBJECTS || min_objects > max_objects {
        return Err(Error::InvalidConfig(format!(
            "object count range [{min_objects}, {max_objects}] outside [{MIN_OBJECTS}, {MAX_OBJECTS}]"
        )));
    }
    let span = (max_objects - min_objects + 1) as u64;
    let n = min_objects + (rng.next_u64() % span) as usize;
    let objects = (0..n)
        .map(|position| ObjectSpec {
            shape: Shape::ALL[(rng.next_u64() % 3) as usize],
            color: Color::ALL[(rng.next_u64() % 3) as usize],
            size: Size::ALL[(rng.next_u64() % 2) as usize],
            position,
        })
        .collect();
    Scene::new(objects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn fixed_seed_reproduces_scene() {
        let a = generate_scene(&mut ChaCha12Rng::seed_from_u64(7), 2, 2).unwrap();
        let b = generate_scene(&mut ChaCha12Rng::seed_from_u64(7), 2, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn positions_cover_range() {
        let scene = generate_scene(&mut ChaCha12Rng::seed_from_u64(3), 3, 3).unwrap();
        let positions: Vec<usize> = scene.objects.iter().map(|o| o.position).collect();
        assert_eq!(positions, vec![0, 1, 2]);
    }

    #[test]
    fn object_counts_are_uniform() {
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let mut counts = [0usize; 4];
        let n = 10_000;
        for _ in 0..n {
            let scene = generate_scene(&mut rng, 2, 5).unwrap();
            counts[scene.len() - 2] += 1;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 0.02, "count frequency {f}");
        }
    }

    #[test]
    fn invalid_range_rejected() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(generate_scene(&mut rng, 1, 3).is_err());
        assert!(generate_scene(&mut rng, 3, 6).is_err());
        assert!(generate_scene(&mut rng, 4, 3).is_err());
    }

    #[test]
    fn scene_id_is_content_addressed() {
        let objects = vec![
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
        ];
        let a = Scene::new(objects.clone()).unwrap();
        let b = Scene::new(objects).unwrap();
        assert_eq!(a.id, b.id);
    }
}
