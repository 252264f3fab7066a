use std::ops::{Add, Mul, Sub};

use crate::domain::level::{Block, Material, Pig};
use crate::domain::DomainError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<T = f64> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Bird velocity after an elastic impact with a pig:
/// `vb - 2 mp / (mb + mp) * <vb - vp, xb - xp> / |xb - xp|^2 * (xb - xp)`.
///
/// The grouping of operations matches the grounded bird-pig event, so the
/// two agree bit for bit when `vp` is zero.
pub fn elastic_bird_velocity<T: Scalar>(
    vb: Vec2<T>,
    vp: Vec2<T>,
    xb: Vec2<T>,
    xp: Vec2<T>,
    mb: T,
    mp: T,
) -> Result<Vec2<T>, DomainError> {
    let d = xb - xp;
    let dist_sq = d.norm_sq();
    if dist_sq == T::zero() {
        return Err(DomainError::DegenerateGeometry("bird and pig centers coincide".into()));
    }
    let k = T::lit(2.0) * mp / (mb + mp) * ((vb - vp).dot(d) / dist_sq);
    Ok(Vec2::new(vb.x - k * d.x, vb.y - k * d.y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialProps {
    /// kg per m^2 of block face
    pub density: f64,
    pub life_per_area: f64,
    /// Scales `mass * width` into the force a block withstands.
    pub stability_coef: f64,
    /// Horizontal velocity factor when the bird bounces off a stable block.
    pub reflect_damper: f64,
    /// Velocity factor when the bird breaks through an unstable block.
    pub penetration_damper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialTable {
    pub ice: MaterialProps,
    pub wood: MaterialProps,
    pub stone: MaterialProps,
}

impl MaterialTable {
    pub fn props(&self, m: Material) -> &MaterialProps {
        match m {
            Material::Ice => &self.ice,
            Material::Wood => &self.wood,
            Material::Stone => &self.stone,
        }
    }
}

impl Default for MaterialTable {
    fn default() -> Self {
        let base = |density, life_per_area, stability_coef| MaterialProps {
            density,
            life_per_area,
            stability_coef,
            reflect_damper: 0.6,
            penetration_damper: 0.5,
        };
        MaterialTable {
            ice: base(1.0, 50.0, 5.0),
            wood: base(2.0, 150.0, 10.0),
            stone: base(4.0, 400.0, 20.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAttributes {
    pub mass: f64,
    pub life: f64,
    pub stability: f64,
}

/// Mass, life points and stability of a block whose bottom edge sits at
/// `base_height`. Stability falls off with height.
pub fn block_attributes(
    width: f64,
    height: f64,
    material: Material,
    base_height: f64,
    table: &MaterialTable,
) -> Result<BlockAttributes, DomainError> {
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(DomainError::DegenerateGeometry(format!(
            "block of size {width} x {height} has no area"
        )));
    }
    if !(base_height >= 0.0) {
        return Err(DomainError::DegenerateGeometry(format!("block base below ground ({base_height})")));
    }
    let p = table.props(material);
    let area = width * height;
    let mass = p.density * area;
    Ok(BlockAttributes {
        mass,
        life: p.life_per_area * area,
        stability: p.stability_coef * mass * width / (1.0 + base_height),
    })
}

fn x_overlap(l1: f64, r1: f64, l2: f64, r2: f64) -> bool {
    l1 < r2 && l2 < r1
}

/// Static support pairs `(below, above)`: the upper block's bottom edge lies
/// on the lower block's top edge (within `tol`) and their x-extents overlap.
pub fn block_supports(blocks: &[Block], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, lower) in blocks.iter().enumerate() {
        for (b, upper) in blocks.iter().enumerate() {
            if a != b
                && (upper.bottom() - lower.top()).abs() <= tol
                && x_overlap(lower.left(), lower.right(), upper.left(), upper.right())
            {
                out.push((a, b));
            }
        }
    }
    out
}

/// Pigs resting on blocks, as `(block, pig)` pairs.
pub fn pig_supports(blocks: &[Block], pigs: &[Pig], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        for (p, pig) in pigs.iter().enumerate() {
            if (pig.y - pig.radius - b.top()).abs() <= tol
                && x_overlap(b.left(), b.right(), pig.x - pig.radius, pig.x + pig.radius)
            {
                out.push((k, p));
            }
        }
    }
    out
}

/// Whether a circle overlaps an axis-aligned rectangle, by closest-point
/// distance.
pub fn circle_rect_overlap(cx: f64, cy: f64, r: f64, rx: f64, ry: f64, w: f64, h: f64) -> bool {
    let px = cx.clamp(rx - w / 2.0, rx + w / 2.0);
    let py = cy.clamp(ry - h / 2.0, ry + h / 2.0);
    (cx - px).powi(2) + (cy - py).powi(2) <= r * r
}

/// Height of a block's bottom edge above the ground.
pub fn base_height(b: &Block) -> f64 {
    b.bottom().max(0.0)
}
