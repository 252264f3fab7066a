use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{Bird, BirdKind, Block, Level, Material, Physics, Pig, Platform, Point};

/// Pig x positions; at most one pig per slot.
pub const PIG_SLOTS: [f64; 11] = [50.0, 62.0, 74.0, 86.0, 98.0, 110.0, 122.0, 134.0, 146.0, 158.0, 170.0];

/// Tallest block stack a structure may have, m.
pub const MAX_STACK_HEIGHT: f64 = 20.0;

const MIN_BLOCK_HEIGHT: f64 = 1.0;
const MAX_BLOCK_HEIGHT: f64 = 3.0;
const TNT_PROBABILITY: f64 = 0.1;
const MAX_BIRDS: usize = 10;
const MAX_PLATFORMS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n_pigs: usize,
    /// Block budget, shared among the structures. Unused when no pig gets
    /// a structure.
    pub n_blocks: usize,
    pub n_platforms: usize,
    pub n_birds: usize,
    /// Chance that a pig stands on a column or hides behind a wall rather
    /// than sitting in the open.
    pub structure_probability: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_pigs: 2,
            n_blocks: 6,
            n_platforms: 1,
            n_birds: 3,
            structure_probability: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("{name}: {message}")]
    Param { name: &'static str, message: String },
    #[error("infeasible level: {0}")]
    Infeasible(String),
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |name, message: String| Err(GenerateError::Param { name, message });
        if self.n_pigs == 0 || self.n_pigs > PIG_SLOTS.len() {
            return bad("n_pigs", format!("must be in 1..={}, got {}", PIG_SLOTS.len(), self.n_pigs));
        }
        if self.n_birds == 0 || self.n_birds > MAX_BIRDS {
            return bad("n_birds", format!("must be in 1..={MAX_BIRDS}, got {}", self.n_birds));
        }
        if self.n_platforms > MAX_PLATFORMS {
            return bad("n_platforms", format!("must be at most {MAX_PLATFORMS}, got {}", self.n_platforms));
        }
        if !(0.0..=1.0).contains(&self.structure_probability) {
            return bad(
                "structure_probability",
                format!("must be in [0, 1], got {}", self.structure_probability),
            );
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Structure {
    Column,
    Wall,
}

/// Rounds to `1 / scale`, so files show short decimals.
fn round_to(v: f64, scale: f64) -> f64 {
    (v * scale).round() / scale
}

/// Stack of `n` blocks centered on `x`, bottom on the ground. Returns the
/// blocks and the height of the stack's top.
fn stack(rng: &mut ChaCha8Rng, n: usize, x: f64) -> (Vec<Block>, f64) {
    let width = round_to(rng.gen_range(1.0..=2.0), 10.0);
    let mut top = 0.0;
    let mut blocks = Vec::with_capacity(n);
    for j in 0..n {
        // leave room for the blocks still to come
        let room = MAX_STACK_HEIGHT - top - (n - j - 1) as f64 * MIN_BLOCK_HEIGHT;
        let h = round_to(rng.gen_range(MIN_BLOCK_HEIGHT..=MAX_BLOCK_HEIGHT), 10.0).min(room);
        let material = Material::ALL[rng.gen_range(0..Material::ALL.len())];
        blocks.push(Block {
            x,
            y: top + h / 2.0,
            width,
            height: h,
            material,
            explosive: rng.gen_bool(TNT_PROBABILITY),
            life: None,
        });
        top += h;
    }
    (blocks, top)
}

/// Random level, a pure function of `seed` and `params`.
pub fn generate_level(seed: u64, params: &GenParams) -> Result<Level, GenerateError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = sample(&mut rng, PIG_SLOTS.len(), params.n_pigs).into_vec();
    slots.sort_unstable();

    let mut plan: Vec<Option<Structure>> = slots
        .iter()
        .map(|_| {
            let structured = rng.gen_bool(params.structure_probability);
            let kind = if rng.gen_bool(0.5) {
                Structure::Column
            } else {
                Structure::Wall
            };
            structured.then_some(kind)
        })
        .collect();
    // every structure needs at least one block; extra ones go without
    let mut budget = params.n_blocks;
    for p in plan.iter_mut().filter(|p| p.is_some()) {
        if budget == 0 {
            *p = None;
        } else {
            budget -= 1;
        }
    }
    let n_structures = plan.iter().filter(|p| p.is_some()).count();
    let shares: Vec<usize> = (0..n_structures)
        .map(|i| params.n_blocks / n_structures + usize::from(i < params.n_blocks % n_structures))
        .collect();
    if let Some(&tallest) = shares.iter().max() {
        if tallest as f64 * MIN_BLOCK_HEIGHT > MAX_STACK_HEIGHT {
            return Err(GenerateError::Infeasible(format!(
                "{tallest} blocks in one structure need more than {MAX_STACK_HEIGHT} m of vertical room"
            )));
        }
    }

    let mut pigs = Vec::new();
    let mut blocks = Vec::new();
    let mut shares = shares.into_iter();
    for (&slot, structure) in slots.iter().zip(&plan) {
        let x = PIG_SLOTS[slot] + round_to(rng.gen_range(-2.0..=2.0), 100.0);
        let radius = round_to(rng.gen_range(0.5..=0.8), 20.0);
        let y = match structure {
            None => radius,
            Some(Structure::Column) => {
                let (mut column, top) = stack(&mut rng, shares.next().unwrap_or(0), x);
                blocks.append(&mut column);
                top + radius
            }
            Some(Structure::Wall) => {
                // between the slingshot and the pig, a meter clear of it
                let (mut wall, _) = stack(&mut rng, shares.next().unwrap_or(0), 0.0);
                let wx = x - radius - 1.0 - wall[0].width / 2.0;
                for b in &mut wall {
                    b.x = wx;
                }
                blocks.append(&mut wall);
                radius
            }
        };
        pigs.push(Pig { x, y, radius, mass: 1.0 });
    }

    let platforms = (0..params.n_platforms)
        .map(|_| {
            let height = round_to(rng.gen_range(0.5..=1.5), 10.0);
            Platform {
                x: round_to(rng.gen_range(30.0..=180.0), 10.0),
                y: round_to(rng.gen_range(MAX_STACK_HEIGHT + 5.0..=45.0), 10.0),
                width: round_to(rng.gen_range(3.0..=8.0), 10.0),
                height,
            }
        })
        .collect();

    let level = Level {
        slingshot: Point { x: 10.0, y: 5.0 },
        birds: (0..params.n_birds)
            .map(|id| Bird {
                id,
                kind: BirdKind::Red,
                mass: 1.0,
            })
            .collect(),
        pigs,
        blocks,
        platforms,
        physics: Physics::default(),
    };
    debug_assert!(level.validate().is_ok());
    Ok(level)
}
