//! Straight-line reimplementation of one bird's discrete flight over a
//! block-free level. Shares formulas with the grounded model but none of
//! its machinery, so the two can check each other.

use std::collections::BTreeSet;

use crate::domain::{DomainConfig, Level};
use crate::sim::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    /// Ticks available from the start of the episode, aiming included.
    pub horizon: u64,
    pub bird_radius: f64,
    pub ground_clearance: f64,
    pub flight_tick_limit: u64,
}

impl From<&DomainConfig> for OracleConfig {
    fn from(c: &DomainConfig) -> Self {
        OracleConfig {
            dt: c.dt,
            horizon: c.horizon,
            bird_radius: c.bird_radius,
            ground_clearance: c.ground_clearance,
            flight_tick_limit: c.flight_tick_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightPoint {
    /// Ticks since the start of the episode.
    pub tick: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlightEnd {
    Expired,
    Horizon,
    /// The bird's center landed exactly on a pig's.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flight {
    pub release_tick: u64,
    pub angle: f64,
    /// Bird position at the end of every tick from the release on.
    pub path: Vec<FlightPoint>,
    /// `(tick, pig)` for every pig struck, in order.
    pub hits: Vec<(u64, usize)>,
    pub end: FlightEnd,
    /// Per pig, the smallest gap between bird and pig circles seen while
    /// the pig was alive (negative on overlap).
    pub closest: Vec<f64>,
}

/// Aiming angle after `k` ticks of waiting.
pub fn aim_angle(level: &Level, dt: f64, k: u64) -> f64 {
    let ph = &level.physics;
    let mut a = 0.0;
    for _ in 0..k {
        if a < ph.max_angle && a >= 0.0 {
            a += ph.angle_rate * dt;
        } else {
            break;
        }
    }
    a
}

fn sin_deg(t: f64) -> f64 {
    let p = t * (180.0 - t);
    4.0 * p / (40500.0 - p)
}

fn cos_rad(t: f64) -> f64 {
    1.0 - t * t / 2.0
}

fn touches_rect(cx: f64, cy: f64, r: f64, rx: f64, ry: f64, w: f64, h: f64) -> bool {
    let (hw, hh) = (w / 2.0, h / 2.0);
    let (left, right, bottom, top) = (rx - hw, rx + hw, ry - hh, ry + hh);
    if !(cx >= left - r && cx <= right + r && cy >= bottom - r && cy <= top + r) {
        return false;
    }
    let corner = |ex: f64, ey: f64| (cx - ex) * (cx - ex) + (cy - ey) * (cy - ey) <= r * r;
    (cx >= left && cx <= right)
        || (cy >= bottom && cy <= top)
        || corner(left, bottom)
        || corner(right, bottom)
        || corner(left, top)
        || corner(right, top)
}

struct Bird {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    bounces: f64,
    flight_time: f64,
    expired: bool,
    active: bool,
}

enum Fired {
    Nothing,
    Event,
    Degenerate,
}

/// Fires the first enabled event, in the model's declaration order.
fn fire_one(b: &mut Bird, level: &Level, cfg: &OracleConfig, dead: &mut [bool], hits: &mut Vec<usize>) -> Fired {
    let live = b.active && !b.expired;
    let r = cfg.bird_radius;
    if live {
        for (i, p) in level.pigs.iter().enumerate() {
            let (dx, dy) = (b.x - p.x, b.y - p.y);
            if dead[i] || dx * dx + dy * dy > (r + p.radius) * (r + p.radius) {
                continue;
            }
            dead[i] = true;
            hits.push(i);
            let d2 = dx * dx + dy * dy;
            if d2 == 0.0 {
                return Fired::Degenerate;
            }
            let k = 2.0 * p.mass / (level.birds[0].mass + p.mass) * ((b.vx * dx + b.vy * dy) / d2);
            b.vx -= k * dx;
            b.vy -= k * dy;
            b.bounces += 1.0;
            return Fired::Event;
        }
        for q in &level.platforms {
            if touches_rect(b.x, b.y, r, q.x, q.y, q.width, q.height) {
                b.vx = 0.0;
                b.vy = 0.0;
                b.expired = true;
                return Fired::Event;
            }
        }
    }
    if b.active && b.y <= 0.0 {
        b.y = cfg.ground_clearance;
        b.vy = -b.vy * level.physics.ground_damper;
        b.bounces += 1.0;
        return Fired::Event;
    }
    if live {
        let limit = cfg.flight_tick_limit as f64 * cfg.dt;
        if b.x > level.physics.scene_x_bound || b.x < 0.0 || b.flight_time >= limit || b.bounces >= 3.0 {
            b.expired = true;
            return Fired::Event;
        }
    }
    if b.active && b.expired {
        b.active = false;
        return Fired::Event;
    }
    Fired::Nothing
}

fn settle(b: &mut Bird, level: &Level, cfg: &OracleConfig, dead: &mut [bool], hits: &mut Vec<usize>) -> bool {
    for _ in 0..1000 {
        match fire_one(b, level, cfg, dead, hits) {
            Fired::Nothing => return true,
            Fired::Event => {}
            Fired::Degenerate => return false,
        }
    }
    false
}

/// Flies bird 0 of a block-free level released after `release_tick` ticks
/// of aiming, until it expires or the horizon is reached.
pub fn simulate_flight(level: &Level, release_tick: u64, cfg: &OracleConfig) -> Result<Flight, SimError> {
    if !level.blocks.is_empty() {
        return Err(SimError::OracleWithBlocks);
    }
    let ph = &level.physics;
    let angle = aim_angle(level, cfg.dt, release_tick);
    let speed = ph.launch_speed;
    let mut b = Bird {
        x: level.slingshot.x,
        y: level.slingshot.y,
        vx: speed * cos_rad(angle * (std::f64::consts::PI / 180.0)),
        vy: speed * sin_deg(angle),
        bounces: 0.0,
        flight_time: 0.0,
        expired: false,
        active: true,
    };
    let mut dead = vec![false; level.pigs.len()];
    let mut flight = Flight {
        release_tick,
        angle,
        path: Vec::new(),
        hits: Vec::new(),
        end: FlightEnd::Horizon,
        closest: vec![f64::INFINITY; level.pigs.len()],
    };
    let mut struck = Vec::new();
    let mut tick = release_tick;
    while tick < cfg.horizon {
        if !settle(&mut b, level, cfg, &mut dead, &mut struck) {
            flight.hits.extend(struck.drain(..).map(|p| (tick, p)));
            flight.end = FlightEnd::Degenerate;
            return Ok(flight);
        }
        if b.active && b.y > 0.0 {
            let (vy, y, x) = (b.vy + -ph.gravity * cfg.dt, b.y + b.vy * cfg.dt, b.x + b.vx * cfg.dt);
            b.vy = vy;
            b.y = y;
            b.x = x;
            b.flight_time += 1.0 * cfg.dt;
        }
        tick += 1;
        let ok = settle(&mut b, level, cfg, &mut dead, &mut struck);
        flight.hits.extend(struck.drain(..).map(|p| (tick, p)));
        flight.path.push(FlightPoint { tick, x: b.x, y: b.y });
        for (i, p) in level.pigs.iter().enumerate() {
            if !dead[i] || flight.hits.iter().any(|&(t, h)| h == i && t == tick) {
                let gap = ((b.x - p.x).powi(2) + (b.y - p.y).powi(2)).sqrt() - (cfg.bird_radius + p.radius);
                flight.closest[i] = flight.closest[i].min(gap);
            }
        }
        if !ok {
            flight.end = FlightEnd::Degenerate;
            return Ok(flight);
        }
        if !b.active {
            flight.end = FlightEnd::Expired;
            return Ok(flight);
        }
    }
    Ok(flight)
}

/// Release ticks that strike one pig, from a sweep over every release tick
/// in the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleHits {
    pub hits: BTreeSet<u64>,
    /// Smallest circle gap over all non-hitting releases; `INFINITY` when
    /// every release hits.
    pub closest_miss: f64,
}

/// Sweeps every release tick and reports, per pig, the ticks whose flight
/// strikes it within the horizon.
pub fn oracle_sweep(level: &Level, cfg: &OracleConfig) -> Result<Vec<OracleHits>, SimError> {
    let mut out = vec![
        OracleHits {
            hits: BTreeSet::new(),
            closest_miss: f64::INFINITY,
        };
        level.pigs.len()
    ];
    for k in 0..cfg.horizon {
        let f = simulate_flight(level, k, cfg)?;
        for (i, o) in out.iter_mut().enumerate() {
            if f.hits.iter().any(|&(_, p)| p == i) {
                o.hits.insert(k);
            } else {
                o.closest_miss = o.closest_miss.min(f.closest[i]);
            }
        }
    }
    Ok(out)
}

/// Release ticks whose flight strikes pig `pig`.
pub fn oracle_hit(level: &Level, pig: usize, cfg: &OracleConfig) -> Result<OracleHits, SimError> {
    if pig >= level.pigs.len() {
        return Err(SimError::NoSuchPig(pig));
    }
    Ok(oracle_sweep(level, cfg)?.swap_remove(pig))
}
