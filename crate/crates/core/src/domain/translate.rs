//! Grounding of a level into fluents, the launch action, processes and the
//! event catalogue.
//!
//! Events are declared category by category (bird-pig, TNT, bird-block,
//! collapse, pig-atop-collapse, platform, ground, out-of-scene, three-bounce,
//! loading), birds varying fastest inside a category. Every bird event is
//! guarded by `active_bird = bird_id`, so the effective firing order is the
//! category order for whichever bird is in play.

use crate::domain::level::{Block, Level};
use crate::domain::physics::{base_height, block_attributes, block_supports, pig_supports};
use crate::domain::{DomainConfig, DomainError, GoalMode};
use crate::expr::{BoolExpr, BoolFluent, NumExpr, NumFluent};
use crate::model::{
    ActionDef, Assignment, EventDef, FluentSchema, HybridProblem, ModelError, ProblemParts, ProcessDef, State, Unit,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalFluents {
    pub gravity: NumFluent,
    pub angle: NumFluent,
    pub angle_rate: NumFluent,
    pub max_angle: NumFluent,
    pub ground_damper: NumFluent,
    pub active_bird: NumFluent,
    pub pigs_killed: NumFluent,
    /// Birds not yet used up, the active one included.
    pub birds_remaining: NumFluent,
    pub angle_adjusted: BoolFluent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirdFluents {
    pub x: NumFluent,
    pub y: NumFluent,
    pub vx: NumFluent,
    pub vy: NumFluent,
    /// Launch speed.
    pub v: NumFluent,
    pub mass: NumFluent,
    pub radius: NumFluent,
    pub bounce_count: NumFluent,
    pub id: NumFluent,
    pub flight_time: NumFluent,
    pub released: BoolFluent,
    pub expired: BoolFluent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PigFluents {
    pub x: NumFluent,
    pub y: NumFluent,
    pub radius: NumFluent,
    pub mass: NumFluent,
    pub dead: BoolFluent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockFluents {
    pub x: NumFluent,
    pub y: NumFluent,
    pub width: NumFluent,
    pub height: NumFluent,
    pub mass: NumFluent,
    pub life: NumFluent,
    pub stability: NumFluent,
    pub explosive: BoolFluent,
    pub dead: BoolFluent,
    pub fallen: BoolFluent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformFluents {
    pub x: NumFluent,
    pub y: NumFluent,
    pub width: NumFluent,
    pub height: NumFluent,
}

/// Fluent handles per object, in level order.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainIndex {
    pub globals: GlobalFluents,
    pub birds: Vec<BirdFluents>,
    pub pigs: Vec<PigFluents>,
    pub blocks: Vec<BlockFluents>,
    pub platforms: Vec<PlatformFluents>,
    /// `contact[b][k]`: bird `b` is touching block `k` since its last
    /// collision with it.
    pub contact: Vec<Vec<BoolFluent>>,
}

/// Degrees to radians, applied inside the launch action only.
pub const DEG_TO_RAD: f64 = std::f64::consts::PI / 180.0;

fn declare(level: &Level) -> Result<(FluentSchema, DomainIndex), ModelError> {
    let mut s = FluentSchema::new();
    let globals = GlobalFluents {
        gravity: s.declare_num("gravity", Unit::MetersPerSecondSquared)?,
        angle: s.declare_num("angle", Unit::Degrees)?,
        angle_rate: s.declare_num("angle_rate", Unit::DegreesPerSecond)?,
        max_angle: s.declare_num("max_angle", Unit::Degrees)?,
        ground_damper: s.declare_num("ground_damper", Unit::Dimensionless)?,
        active_bird: s.declare_num("active_bird", Unit::Count)?,
        pigs_killed: s.declare_num("pigs_killed", Unit::Count)?,
        birds_remaining: s.declare_num("birds_remaining", Unit::Count)?,
        angle_adjusted: s.declare_bool("angle_adjusted")?,
    };
    let mut birds = Vec::new();
    for i in 0..level.birds.len() {
        let t = format!("[b{i}]");
        birds.push(BirdFluents {
            x: s.declare_num(&format!("x_bird{t}"), Unit::Meters)?,
            y: s.declare_num(&format!("y_bird{t}"), Unit::Meters)?,
            vx: s.declare_num(&format!("vx_bird{t}"), Unit::MetersPerSecond)?,
            vy: s.declare_num(&format!("vy_bird{t}"), Unit::MetersPerSecond)?,
            v: s.declare_num(&format!("v_bird{t}"), Unit::MetersPerSecond)?,
            mass: s.declare_num(&format!("m_bird{t}"), Unit::Kilograms)?,
            radius: s.declare_num(&format!("r_bird{t}"), Unit::Meters)?,
            bounce_count: s.declare_num(&format!("bounce_count{t}"), Unit::Count)?,
            id: s.declare_num(&format!("bird_id{t}"), Unit::Count)?,
            flight_time: s.declare_num(&format!("flight_time{t}"), Unit::Seconds)?,
            released: s.declare_bool(&format!("bird_released{t}"))?,
            expired: s.declare_bool(&format!("bird_expired{t}"))?,
        });
    }
    let mut pigs = Vec::new();
    for i in 0..level.pigs.len() {
        let t = format!("[p{i}]");
        pigs.push(PigFluents {
            x: s.declare_num(&format!("x_pig{t}"), Unit::Meters)?,
            y: s.declare_num(&format!("y_pig{t}"), Unit::Meters)?,
            radius: s.declare_num(&format!("r_pig{t}"), Unit::Meters)?,
            mass: s.declare_num(&format!("m_pig{t}"), Unit::Kilograms)?,
            dead: s.declare_bool(&format!("pig_dead{t}"))?,
        });
    }
    let mut blocks = Vec::new();
    for i in 0..level.blocks.len() {
        let t = format!("[k{i}]");
        blocks.push(BlockFluents {
            x: s.declare_num(&format!("x_block{t}"), Unit::Meters)?,
            y: s.declare_num(&format!("y_block{t}"), Unit::Meters)?,
            width: s.declare_num(&format!("w_block{t}"), Unit::Meters)?,
            height: s.declare_num(&format!("h_block{t}"), Unit::Meters)?,
            mass: s.declare_num(&format!("m_block{t}"), Unit::Kilograms)?,
            life: s.declare_num(&format!("life_block{t}"), Unit::Dimensionless)?,
            stability: s.declare_num(&format!("stability_block{t}"), Unit::Dimensionless)?,
            explosive: s.declare_bool(&format!("block_explosive{t}"))?,
            dead: s.declare_bool(&format!("block_dead{t}"))?,
            fallen: s.declare_bool(&format!("block_fallen{t}"))?,
        });
    }
    let mut platforms = Vec::new();
    for i in 0..level.platforms.len() {
        let t = format!("[q{i}]");
        platforms.push(PlatformFluents {
            x: s.declare_num(&format!("x_platform{t}"), Unit::Meters)?,
            y: s.declare_num(&format!("y_platform{t}"), Unit::Meters)?,
            width: s.declare_num(&format!("w_platform{t}"), Unit::Meters)?,
            height: s.declare_num(&format!("h_platform{t}"), Unit::Meters)?,
        });
    }
    let mut contact = Vec::new();
    for b in 0..level.birds.len() {
        let mut row = Vec::new();
        for k in 0..level.blocks.len() {
            row.push(s.declare_bool(&format!("contact[b{b},k{k}]"))?);
        }
        contact.push(row);
    }
    Ok((
        s,
        DomainIndex {
            globals,
            birds,
            pigs,
            blocks,
            platforms,
            contact,
        },
    ))
}

fn n<T: Scalar>(f: &NumFluent) -> NumExpr<T> {
    NumExpr::fluent(f)
}

fn b<T: Scalar>(f: &BoolFluent) -> BoolExpr<T> {
    BoolExpr::fluent(f)
}

fn lit<T: Scalar>(v: f64) -> NumExpr<T> {
    NumExpr::lit(T::lit(v))
}

fn incr<T: Scalar>(f: &NumFluent) -> Assignment<T> {
    Assignment::num(f, n(f) + lit(1.0))
}

/// Circle/rectangle overlap by closest-point distance, written without
/// `min`/`max`: inside the rectangle grown by `r`, the circle touches unless
/// it sits in a corner region farther than `r` from the corner.
fn circle_rect<T: Scalar>(
    cx: NumExpr<T>,
    cy: NumExpr<T>,
    r: NumExpr<T>,
    rx: NumExpr<T>,
    ry: NumExpr<T>,
    w: NumExpr<T>,
    h: NumExpr<T>,
) -> BoolExpr<T> {
    let hw = w / lit(2.0);
    let hh = h / lit(2.0);
    let left = rx.clone() - hw.clone();
    let right = rx + hw;
    let bottom = ry.clone() - hh.clone();
    let top = ry + hh;
    let corner = |ex: &NumExpr<T>, ey: &NumExpr<T>| {
        ((cx.clone() - ex.clone()).square() + (cy.clone() - ey.clone()).square()).le(r.clone().square())
    };
    BoolExpr::and(vec![
        cx.clone().ge(left.clone() - r.clone()),
        cx.clone().le(right.clone() + r.clone()),
        cy.clone().ge(bottom.clone() - r.clone()),
        cy.clone().le(top.clone() + r.clone()),
        BoolExpr::or(vec![
            BoolExpr::and(vec![cx.clone().ge(left.clone()), cx.clone().le(right.clone())]),
            BoolExpr::and(vec![cy.clone().ge(bottom.clone()), cy.clone().le(top.clone())]),
            corner(&left, &bottom),
            corner(&right, &bottom),
            corner(&left, &top),
            corner(&right, &top),
        ]),
    ])
}

fn circles<T: Scalar>(
    ax: NumExpr<T>,
    ay: NumExpr<T>,
    ar: NumExpr<T>,
    bx: NumExpr<T>,
    by: NumExpr<T>,
    br: NumExpr<T>,
) -> BoolExpr<T> {
    ((ax - bx).square() + (ay - by).square()).le((ar + br).square())
}

/// `m^2 (vx^2 + vy^2)`: squared impact momentum of a bird.
fn momentum_sq<T: Scalar>(bf: &BirdFluents) -> NumExpr<T> {
    n(&bf.mass).square() * (n(&bf.vx).square() + n(&bf.vy).square())
}

/// Conjuncts shared by every collision of bird `bf` with the scene.
fn in_flight<T: Scalar>(g: &GlobalFluents, bf: &BirdFluents) -> Vec<BoolExpr<T>> {
    vec![
        n(&g.active_bird).equals(n(&bf.id)),
        b(&bf.released),
        b(&bf.expired).not(),
    ]
}

fn with<T>(mut base: Vec<BoolExpr<T>>, more: impl IntoIterator<Item = BoolExpr<T>>) -> BoolExpr<T> {
    base.extend(more);
    BoolExpr::And(base)
}

fn bird_block_overlap<T: Scalar>(bf: &BirdFluents, kf: &BlockFluents) -> BoolExpr<T> {
    circle_rect(
        n(&bf.x),
        n(&bf.y),
        n(&bf.radius),
        n(&kf.x),
        n(&kf.y),
        n(&kf.width),
        n(&kf.height),
    )
}

fn event<T: Scalar>(
    out: &mut Vec<EventDef<T>>,
    name: String,
    pre: BoolExpr<T>,
    effects: Vec<Assignment<T>>,
) -> Result<(), ModelError> {
    out.push(EventDef::new(name, pre, effects)?);
    Ok(())
}

pub(crate) fn ground<T: Scalar>(
    level: &Level,
    cfg: &DomainConfig,
    goal: GoalMode,
) -> Result<(HybridProblem<T>, DomainIndex), DomainError> {
    level.validate()?;
    if !(cfg.ground_clearance > 0.0) {
        return Err(DomainError::DegenerateGeometry("ground clearance must be positive".into()));
    }
    let (schema, ix) = declare(level)?;
    let g = &ix.globals;
    let ph = &level.physics;

    let mut init = State::<T>::zeroed(&schema);
    init.set(&g.gravity, T::lit(ph.gravity));
    init.set(&g.angle_rate, T::lit(ph.angle_rate));
    init.set(&g.max_angle, T::lit(ph.max_angle));
    init.set(&g.ground_damper, T::lit(ph.ground_damper));
    init.set(&g.birds_remaining, T::lit(level.birds.len() as f64));
    for (i, (bird, bf)) in level.birds.iter().zip(&ix.birds).enumerate() {
        init.set(&bf.x, T::lit(level.slingshot.x));
        init.set(&bf.y, T::lit(level.slingshot.y));
        init.set(&bf.v, T::lit(ph.launch_speed));
        init.set(&bf.mass, T::lit(bird.mass));
        init.set(&bf.radius, T::lit(cfg.bird_radius));
        init.set(&bf.id, T::lit(i as f64));
    }
    for (pig, pf) in level.pigs.iter().zip(&ix.pigs) {
        init.set(&pf.x, T::lit(pig.x));
        init.set(&pf.y, T::lit(pig.y));
        init.set(&pf.radius, T::lit(pig.radius));
        init.set(&pf.mass, T::lit(pig.mass));
    }
    for (blk, kf) in level.blocks.iter().zip(&ix.blocks) {
        let attr = block_attributes(blk.width, blk.height, blk.material, base_height(blk), &cfg.materials)?;
        init.set(&kf.x, T::lit(blk.x));
        init.set(&kf.y, T::lit(blk.y));
        init.set(&kf.width, T::lit(blk.width));
        init.set(&kf.height, T::lit(blk.height));
        init.set(&kf.mass, T::lit(attr.mass));
        init.set(&kf.life, T::lit(blk.life.unwrap_or(attr.life)));
        init.set(&kf.stability, T::lit(attr.stability));
        init.set_bool(&kf.explosive, blk.explosive);
    }
    for (q, qf) in level.platforms.iter().zip(&ix.platforms) {
        init.set(&qf.x, T::lit(q.x));
        init.set(&qf.y, T::lit(q.y));
        init.set(&qf.width, T::lit(q.width));
        init.set(&qf.height, T::lit(q.height));
    }

    let launchers = match goal {
        GoalMode::Full => &ix.birds[..],
        GoalMode::SingleShot => &ix.birds[..1],
    };
    let actions = launchers
        .iter()
        .enumerate()
        .map(|(i, bf)| {
            ActionDef::new(
                format!("pa-twang[b{i}]"),
                BoolExpr::and(vec![
                    n(&g.active_bird).equals(n(&bf.id)),
                    b(&g.angle_adjusted).not(),
                    b(&bf.released).not(),
                ]),
                vec![
                    Assignment::num(&bf.vy, n(&bf.v) * n(&g.angle).approx_sin()),
                    Assignment::num(&bf.vx, n(&bf.v) * (n(&g.angle) * lit(DEG_TO_RAD)).approx_cos()),
                    Assignment::boolean(&bf.released, true),
                    Assignment::boolean(&g.angle_adjusted, true),
                ],
            )
        })
        .collect();

    let mut processes = Vec::new();
    for (i, bf) in ix.birds.iter().enumerate() {
        processes.push(ProcessDef::new(
            format!("increasing_angle[b{i}]"),
            BoolExpr::and(vec![
                b(&g.angle_adjusted).not(),
                n(&g.active_bird).equals(n(&bf.id)),
                b(&bf.released).not(),
                n(&g.angle).lt(n(&g.max_angle)),
                n(&g.angle).ge(lit(0.0)),
            ]),
            vec![(g.angle.clone(), n(&g.angle_rate))],
        ));
        processes.push(ProcessDef::new(
            format!("flying[b{i}]"),
            BoolExpr::and(vec![
                b(&bf.released),
                n(&g.active_bird).equals(n(&bf.id)),
                n(&bf.y).gt(lit(0.0)),
            ]),
            vec![
                (bf.vy.clone(), -n(&g.gravity)),
                (bf.y.clone(), n(&bf.vy)),
                (bf.x.clone(), n(&bf.vx)),
                (bf.flight_time.clone(), lit(1.0)),
            ],
        ));
    }

    let events = ground_events(level, cfg, &ix)?;

    let goal_expr = match goal {
        GoalMode::Full => BoolExpr::and(ix.pigs.iter().map(|pf| b(&pf.dead)).collect()),
        GoalMode::SingleShot => n(&g.pigs_killed).ge(lit(1.0)),
    };

    let problem = HybridProblem::new(ProblemParts {
        schema,
        initial: init,
        actions,
        events,
        processes,
        goal: goal_expr,
        dt: T::lit(cfg.dt),
        horizon: cfg.horizon,
    })?;
    Ok((problem, ix))
}

fn tnt_reaches_block(tnt: &Block, other: &Block, radius: f64) -> bool {
    (other.x - tnt.x).abs() <= radius + other.width / 2.0
}

fn ground_events<T: Scalar>(level: &Level, cfg: &DomainConfig, ix: &DomainIndex) -> Result<Vec<EventDef<T>>, DomainError> {
    let g = &ix.globals;
    let mut ev: Vec<EventDef<T>> = Vec::new();
    let tnt: Vec<usize> = (0..level.blocks.len()).filter(|&k| level.blocks[k].explosive).collect();
    let plain: Vec<usize> = (0..level.blocks.len()).filter(|&k| !level.blocks[k].explosive).collect();
    let kill = |pf: &PigFluents| vec![Assignment::boolean(&pf.dead, true), incr(&g.pigs_killed)];

    // 1. bird hits pig: the pig dies, the bird deflects elastically
    for (bi, bf) in ix.birds.iter().enumerate() {
        for (pi, pf) in ix.pigs.iter().enumerate() {
            let dx = n::<T>(&bf.x) - n(&pf.x);
            let dy = n::<T>(&bf.y) - n(&pf.y);
            let k = lit::<T>(2.0) * n(&pf.mass) / (n(&bf.mass) + n(&pf.mass))
                * ((n(&bf.vx) * dx.clone() + n(&bf.vy) * dy.clone()) / (dx.clone().square() + dy.clone().square()));
            let mut pre = vec![
                b(&pf.dead).not(),
                circles(n(&bf.x), n(&bf.y), n(&bf.radius), n(&pf.x), n(&pf.y), n(&pf.radius)),
            ];
            if let Some(f) = cfg.pig_force_threshold {
                pre.push(momentum_sq(bf).ge(lit(f * f)));
            }
            let mut eff = kill(pf);
            eff.push(Assignment::num(&bf.vx, n(&bf.vx) - k.clone() * dx));
            eff.push(Assignment::num(&bf.vy, n(&bf.vy) - k * dy));
            eff.push(incr(&bf.bounce_count));
            event(&mut ev, format!("bird_pig[b{bi},p{pi}]"), with(in_flight(g, bf), pre), eff)?;
        }
    }

    // 2. TNT: contact detonates the crate, which destroys nearby pigs and blocks
    for (bi, bf) in ix.birds.iter().enumerate() {
        for &k in &tnt {
            let kf = &ix.blocks[k];
            event(
                &mut ev,
                format!("bird_tnt[b{bi},k{k}]"),
                with(in_flight(g, bf), [b(&kf.dead).not(), bird_block_overlap(bf, kf)]),
                vec![Assignment::boolean(&kf.dead, true), incr(&bf.bounce_count)],
            )?;
        }
    }
    for &k in &tnt {
        let (kb, kf) = (&level.blocks[k], &ix.blocks[k]);
        for (pi, (pig, pf)) in level.pigs.iter().zip(&ix.pigs).enumerate() {
            if (pig.x - kb.x).abs() > cfg.tnt_radius + pig.radius {
                continue;
            }
            let near = circles(n(&kf.x), n(&kf.y), lit(cfg.tnt_radius), n(&pf.x), n(&pf.y), n(&pf.radius));
            event(
                &mut ev,
                format!("tnt_pig[k{k},p{pi}]"),
                BoolExpr::and(vec![b(&kf.dead), b(&pf.dead).not(), near]),
                kill(pf),
            )?;
        }
        for (j, (other, jf)) in level.blocks.iter().zip(&ix.blocks).enumerate() {
            if j == k || !tnt_reaches_block(kb, other, cfg.tnt_radius) {
                continue;
            }
            let near = circle_rect(
                n(&kf.x),
                n(&kf.y),
                lit(cfg.tnt_radius),
                n(&jf.x),
                n(&jf.y),
                n(&jf.width),
                n(&jf.height),
            );
            event(
                &mut ev,
                format!("tnt_block[k{k},k{j}]"),
                BoolExpr::and(vec![b(&kf.dead), b(&jf.dead).not(), near]),
                vec![Assignment::boolean(&jf.dead, true)],
            )?;
        }
    }

    // 3. bird hits block: bounce back if the block holds, break through if not
    for (bi, bf) in ix.birds.iter().enumerate() {
        for &k in &plain {
            let (kf, contact) = (&ix.blocks[k], &ix.contact[bi][k]);
            let props = cfg.materials.props(level.blocks[k].material);
            let touching = || [b(&kf.dead).not(), b(contact).not(), bird_block_overlap(bf, kf)];
            let holds = momentum_sq(bf).le(n(&kf.stability).square());
            let breaks = momentum_sq(bf).gt(n(&kf.stability).square());
            event(
                &mut ev,
                format!("bird_block_stable[b{bi},k{k}]"),
                with(in_flight(g, bf), touching().into_iter().chain([holds])),
                vec![
                    Assignment::num(&bf.vx, n(&bf.vx) * lit(-props.reflect_damper)),
                    Assignment::boolean(contact, true),
                    incr(&bf.bounce_count),
                ],
            )?;
            let impact = n(&bf.mass) * (n(&bf.vx).square() + n(&bf.vy).square()).sqrt();
            event(
                &mut ev,
                format!("bird_block_unstable[b{bi},k{k}]"),
                with(in_flight(g, bf), touching().into_iter().chain([breaks])),
                vec![
                    Assignment::num(&kf.life, n(&kf.life) - impact),
                    Assignment::num(&bf.vx, n(&bf.vx) * lit(props.penetration_damper)),
                    Assignment::num(&bf.vy, n(&bf.vy) * lit(props.penetration_damper)),
                    Assignment::boolean(contact, true),
                    incr(&bf.bounce_count),
                ],
            )?;
        }
    }
    for (k, kf) in ix.blocks.iter().enumerate() {
        event(
            &mut ev,
            format!("block_destroyed[k{k}]"),
            BoolExpr::and(vec![b(&kf.dead).not(), n(&kf.life).le(lit(0.0))]),
            vec![Assignment::boolean(&kf.dead, true)],
        )?;
    }
    for (bi, bf) in ix.birds.iter().enumerate() {
        for &k in &plain {
            let (kf, contact) = (&ix.blocks[k], &ix.contact[bi][k]);
            event(
                &mut ev,
                format!("block_separate[b{bi},k{k}]"),
                BoolExpr::and(vec![
                    n(&g.active_bird).equals(n(&bf.id)),
                    b(contact),
                    bird_block_overlap(bf, kf).not(),
                ]),
                vec![Assignment::boolean(contact, false)],
            )?;
        }
    }

    // 4. blocks resting on a destroyed or fallen block drop to the ground
    let gone = |kf: &BlockFluents| BoolExpr::or(vec![b(&kf.dead), b(&kf.fallen)]);
    for (lo, hi) in block_supports(&level.blocks, cfg.support_tolerance) {
        let (lf, hf) = (&ix.blocks[lo], &ix.blocks[hi]);
        let rest = n::<T>(&hf.height) / lit(2.0);
        event(
            &mut ev,
            format!("collapse[k{lo},k{hi}]"),
            BoolExpr::and(vec![gone(lf), b(&hf.fallen).not(), b(&hf.dead).not()]),
            vec![
                Assignment::boolean(&hf.fallen, true),
                Assignment::num(&hf.stability, lit(0.0)),
                Assignment::num(&hf.y, rest.clone()),
                Assignment::num(&hf.life, n(&hf.life) - lit(cfg.fall_damage) * (n(&hf.y) - rest)),
            ],
        )?;
    }

    // 5. pigs sitting on a collapsing block die
    for (k, p) in pig_supports(&level.blocks, &level.pigs, cfg.support_tolerance) {
        let (kf, pf) = (&ix.blocks[k], &ix.pigs[p]);
        event(
            &mut ev,
            format!("pig_atop_collapse[k{k},p{p}]"),
            BoolExpr::and(vec![gone(kf), b(&pf.dead).not()]),
            kill(pf),
        )?;
    }

    // 6. platforms stop and expire the bird
    for (bi, bf) in ix.birds.iter().enumerate() {
        for (qi, qf) in ix.platforms.iter().enumerate() {
            let touch = circle_rect(
                n(&bf.x),
                n(&bf.y),
                n(&bf.radius),
                n(&qf.x),
                n(&qf.y),
                n(&qf.width),
                n(&qf.height),
            );
            event(
                &mut ev,
                format!("bird_platform[b{bi},q{qi}]"),
                with(in_flight(g, bf), [touch]),
                vec![
                    Assignment::num(&bf.vx, lit(0.0)),
                    Assignment::num(&bf.vy, lit(0.0)),
                    Assignment::boolean(&bf.expired, true),
                ],
            )?;
        }
    }

    // 7. ground bounce
    for (bi, bf) in ix.birds.iter().enumerate() {
        event(
            &mut ev,
            format!("collision_ground[b{bi}]"),
            BoolExpr::and(vec![n(&g.active_bird).equals(n(&bf.id)), n(&bf.y).le(lit(0.0))]),
            vec![
                Assignment::num(&bf.y, lit(cfg.ground_clearance)),
                Assignment::num(&bf.vy, n(&bf.vy) * lit(-1.0) * n(&g.ground_damper)),
                incr(&bf.bounce_count),
            ],
        )?;
    }

    // 8. leaving the scene, or flying for too long
    let flight_limit = cfg.flight_tick_limit as f64 * cfg.dt;
    for (bi, bf) in ix.birds.iter().enumerate() {
        let out = BoolExpr::or(vec![
            n(&bf.x).gt(lit(level.physics.scene_x_bound)),
            n(&bf.x).lt(lit(0.0)),
            n(&bf.flight_time).ge(lit(flight_limit)),
        ]);
        event(
            &mut ev,
            format!("out_of_scene[b{bi}]"),
            with(in_flight(g, bf), [out]),
            vec![Assignment::boolean(&bf.expired, true)],
        )?;
    }

    // 9. three bounces use the bird up
    for (bi, bf) in ix.birds.iter().enumerate() {
        event(
            &mut ev,
            format!("three_bounce[b{bi}]"),
            with(in_flight(g, bf), [n(&bf.bounce_count).ge(lit(3.0))]),
            vec![Assignment::boolean(&bf.expired, true)],
        )?;
    }

    // 10. load the next bird once the active one has expired
    for (bi, bf) in ix.birds.iter().enumerate() {
        let mut eff = vec![
            incr(&g.active_bird),
            Assignment::num(&g.birds_remaining, n(&g.birds_remaining) - lit(1.0)),
            Assignment::num(&g.angle, lit(0.0)),
            Assignment::boolean(&g.angle_adjusted, false),
        ];
        if let Some(next) = ix.birds.get(bi + 1) {
            eff.push(Assignment::num(&next.x, lit(level.slingshot.x)));
            eff.push(Assignment::num(&next.y, lit(level.slingshot.y)));
        }
        event(
            &mut ev,
            format!("load_next[b{bi}]"),
            BoolExpr::and(vec![n(&g.active_bird).equals(n(&bf.id)), b(&bf.expired)]),
            eff,
        )?;
    }
    Ok(ev)
}
