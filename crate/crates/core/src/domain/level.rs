use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failure, naming the first offending document path
/// (e.g. `blocks[0].width`).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct LevelError {
    pub path: String,
    pub message: String,
}

impl LevelError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        LevelError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BirdKind {
    #[default]
    Red,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bird {
    /// Launch order, `0..n`.
    pub id: usize,
    #[serde(rename = "type", default)]
    pub kind: BirdKind,
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pig {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Material {
    Ice,
    Wood,
    Stone,
}

impl Material {
    pub const ALL: [Material; 3] = [Material::Ice, Material::Wood, Material::Stone];

    pub fn as_str(self) -> &'static str {
        match self {
            Material::Ice => "ice",
            Material::Wood => "wood",
            Material::Stone => "stone",
        }
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown material `{0}` (expected ice, wood or stone)")]
pub struct UnknownMaterial(pub String);

impl FromStr for Material {
    type Err = UnknownMaterial;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Material::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownMaterial(s.to_string()))
    }
}

/// Axis-aligned block; `x`, `y` is the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub material: Material,
    #[serde(default)]
    pub explosive: bool,
    /// Remaining life points when the block is already damaged; full life
    /// from the material table otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub life: Option<f64>,
}

impl Block {
    pub fn bottom(&self) -> f64 {
        self.y - self.height / 2.0
    }

    pub fn top(&self) -> f64 {
        self.y + self.height / 2.0
    }

    pub fn left(&self) -> f64 {
        self.x - self.width / 2.0
    }

    pub fn right(&self) -> f64 {
        self.x + self.width / 2.0
    }
}

/// Indestructible rectangle; `x`, `y` is the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Platform {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    /// m/s^2
    pub gravity: f64,
    /// Launch speed, m/s. Every shot uses the maximum.
    pub launch_speed: f64,
    /// deg/s
    pub angle_rate: f64,
    /// deg, at most 80 so the small-angle cosine stays usable
    pub max_angle: f64,
    pub ground_damper: f64,
    /// Birds past this x (or left of 0) leave the scene.
    pub scene_x_bound: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            gravity: 9.8,
            launch_speed: 70.0,
            angle_rate: 10.0,
            max_angle: 80.0,
            ground_damper: 0.4,
            scene_x_bound: 200.0,
        }
    }
}

pub const MAX_LAUNCH_ANGLE: f64 = 80.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub slingshot: Point,
    pub birds: Vec<Bird>,
    pub pigs: Vec<Pig>,
    #[serde(default)]
    pub blocks: Vec<Block>,
    #[serde(default)]
    pub platforms: Vec<Platform>,
    #[serde(default)]
    pub physics: Physics,
}

fn unit_mass() -> f64 {
    1.0
}

fn finite(path: &str, v: f64) -> Result<(), LevelError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(LevelError::new(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<(), LevelError> {
    finite(path, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(LevelError::new(path, format!("must be positive, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), LevelError> {
    finite(path, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(LevelError::new(path, format!("must be non-negative, got {v}")))
    }
}

impl Level {
    /// Checks the level invariants, reporting the first violation.
    pub fn validate(&self) -> Result<(), LevelError> {
        non_negative("slingshot.x", self.slingshot.x)?;
        positive("slingshot.y", self.slingshot.y)?;
        if self.birds.is_empty() {
            return Err(LevelError::new("birds", "at least one bird is required"));
        }
        for (i, b) in self.birds.iter().enumerate() {
            if b.id != i {
                return Err(LevelError::new(
                    format!("birds[{i}].id"),
                    format!("bird ids must be 0..n in launch order, got {}", b.id),
                ));
            }
            positive(&format!("birds[{i}].mass"), b.mass)?;
        }
        for (i, p) in self.pigs.iter().enumerate() {
            finite(&format!("pigs[{i}].x"), p.x)?;
            non_negative(&format!("pigs[{i}].y"), p.y)?;
            positive(&format!("pigs[{i}].radius"), p.radius)?;
            non_negative(&format!("pigs[{i}].mass"), p.mass)?;
        }
        for (i, b) in self.blocks.iter().enumerate() {
            finite(&format!("blocks[{i}].x"), b.x)?;
            non_negative(&format!("blocks[{i}].y"), b.y)?;
            positive(&format!("blocks[{i}].width"), b.width)?;
            positive(&format!("blocks[{i}].height"), b.height)?;
            if let Some(life) = b.life {
                finite(&format!("blocks[{i}].life"), life)?;
            }
        }
        for (i, q) in self.platforms.iter().enumerate() {
            finite(&format!("platforms[{i}].x"), q.x)?;
            non_negative(&format!("platforms[{i}].y"), q.y)?;
            positive(&format!("platforms[{i}].width"), q.width)?;
            positive(&format!("platforms[{i}].height"), q.height)?;
        }
        let ph = &self.physics;
        positive("physics.gravity", ph.gravity)?;
        positive("physics.launch_speed", ph.launch_speed)?;
        positive("physics.angle_rate", ph.angle_rate)?;
        positive("physics.max_angle", ph.max_angle)?;
        if ph.max_angle > MAX_LAUNCH_ANGLE {
            return Err(LevelError::new(
                "physics.max_angle",
                format!("must not exceed {MAX_LAUNCH_ANGLE} degrees, got {}", ph.max_angle),
            ));
        }
        non_negative("physics.ground_damper", ph.ground_damper)?;
        if ph.ground_damper > 1.0 {
            return Err(LevelError::new("physics.ground_damper", "must be at most 1"));
        }
        positive("physics.scene_x_bound", ph.scene_x_bound)?;
        Ok(())
    }

    /// Same level with every block removed.
    pub fn without_blocks(&self) -> Level {
        Level {
            blocks: Vec::new(),
            ..self.clone()
        }
    }

    /// Number of objects of every kind, birds included.
    pub fn object_count(&self) -> usize {
        self.birds.len() + self.pigs.len() + self.blocks.len() + self.platforms.len()
    }
}
