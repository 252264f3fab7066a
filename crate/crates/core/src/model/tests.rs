use proptest::prelude::*;

use super::*;
use crate::expr::{BoolExpr, BoolFluent, NumExpr, NumFluent};

/// A single projectile with a ground bounce event and a flight process
/// mirroring the bird dynamics, plus an angle process.
struct Toy {
    problem: HybridProblem,
    x: NumFluent,
    y: NumFluent,
    vx: NumFluent,
    vy: NumFluent,
    bounces: NumFluent,
    angle: NumFluent,
    released: BoolFluent,
}

fn toy() -> Toy {
    let mut s = FluentSchema::new();
    let x = s.declare_num("x", Unit::Meters).unwrap();
    let y = s.declare_num("y", Unit::Meters).unwrap();
    let vx = s.declare_num("vx", Unit::MetersPerSecond).unwrap();
    let vy = s.declare_num("vy", Unit::MetersPerSecond).unwrap();
    let g = s.declare_num("gravity", Unit::MetersPerSecondSquared).unwrap();
    let damper = s.declare_num("ground_damper", Unit::Dimensionless).unwrap();
    let bounces = s.declare_num("bounce_count", Unit::Count).unwrap();
    let angle = s.declare_num("angle", Unit::Degrees).unwrap();
    let rate = s.declare_num("angle_rate", Unit::DegreesPerSecond).unwrap();
    let released = s.declare_bool("released").unwrap();

    let mut init = State::zeroed(&s);
    init.set(&y, 5.0);
    init.set(&g, 9.8);
    init.set(&damper, 0.4);
    init.set(&rate, 10.0);

    let n = NumExpr::fluent;
    let release = ActionDef::new(
        "release",
        BoolExpr::fluent(&released).not(),
        vec![
            Assignment::num(&vy, NumExpr::lit(70.0) * n(&angle).approx_sin()),
            Assignment::num(
                &vx,
                NumExpr::lit(70.0) * (n(&angle) * NumExpr::lit(std::f64::consts::PI / 180.0)).approx_cos(),
            ),
            Assignment::boolean(&released, true),
        ],
    );
    let ground = EventDef::new(
        "collision_ground[b0]",
        n(&y).le(NumExpr::lit(0.0)),
        vec![
            Assignment::num(&y, NumExpr::lit(1.0)),
            Assignment::num(&vy, n(&vy) * NumExpr::lit(-1.0) * n(&damper)),
            Assignment::num(&bounces, n(&bounces) + NumExpr::lit(1.0)),
        ],
    )
    .unwrap();
    let flying = ProcessDef::new(
        "flying",
        BoolExpr::and(vec![BoolExpr::fluent(&released), n(&y).gt(NumExpr::lit(0.0))]),
        vec![(vy.clone(), -n(&g)), (y.clone(), n(&vy)), (x.clone(), n(&vx))],
    );
    let aiming = ProcessDef::new(
        "increasing_angle",
        BoolExpr::and(vec![BoolExpr::fluent(&released).not(), n(&angle).lt(NumExpr::lit(80.0))]),
        vec![(angle.clone(), n(&rate))],
    );
    let problem = HybridProblem::new(ProblemParts {
        schema: s,
        initial: init,
        actions: vec![release],
        events: vec![ground],
        processes: vec![flying, aiming],
        goal: BoolExpr::Lit(false),
        dt: 0.05,
        horizon: 100,
    })
    .unwrap();
    Toy {
        problem,
        x,
        y,
        vx,
        vy,
        bounces,
        angle,
        released,
    }
}

#[test]
fn quiescent_state_fires_nothing() {
    let t = toy();
    let s0 = t.problem.initial().clone();
    let (s1, log) = fire_events(s0.clone(), t.problem.events()).unwrap();
    assert!(log.is_empty());
    assert!(s1.bit_eq(&s0));
}

#[test]
fn ground_bounce_event() {
    let t = toy();
    let mut s = t.problem.initial().clone();
    s.set(&t.y, -0.3);
    s.set(&t.vy, -8.0);
    let (s, log) = fire_events(s, t.problem.events()).unwrap();
    assert_eq!(log, ["collision_ground[b0]"]);
    assert_eq!(s.get(&t.y), 1.0);
    assert!((s.get(&t.vy) - 3.2).abs() < 1e-12);
    assert_eq!(s.get(&t.bounces), 1.0);
}

#[test]
fn mutually_enabling_events_diverge_at_cap() {
    let mut s = FluentSchema::new();
    let a = s.declare_bool("a").unwrap();
    let on = EventDef::new("on", BoolExpr::fluent(&a).not(), vec![Assignment::boolean(&a, true)]).unwrap();
    let off = EventDef::new("off", BoolExpr::fluent(&a), vec![Assignment::boolean(&a, false)]).unwrap();
    let init: State = State::zeroed(&s);
    match fire_events(init, &[on, off]) {
        Err(ModelError::CascadeDivergence { cap, tail }) => {
            assert_eq!(cap, 1000);
            assert_eq!(tail.len(), 10);
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn flight_step_is_explicit_euler() {
    let t = toy();
    let mut s = t.problem.initial().clone();
    s.set_bool(&t.released, true);
    s.set(&t.vx, 10.0);
    s.set(&t.vy, 2.0);
    let next = advance(s.clone(), t.problem.processes(), 0.05).unwrap();
    assert!((next.get(&t.x) - 0.5).abs() < 1e-12);
    assert!((next.get(&t.vy) - (2.0 - 0.49)).abs() < 1e-12);
    // position uses the pre-step velocity
    assert!((next.get(&t.y) - (5.0 + 2.0 * 0.05)).abs() < 1e-12);
    assert_eq!(next.ticks(), 1);
}

#[test]
fn no_active_process_only_advances_time() {
    let t = toy();
    let mut s = t.problem.initial().clone();
    s.set(&t.angle, 80.0);
    let next = advance(s.clone(), t.problem.processes(), 0.05).unwrap();
    assert_eq!(next.nums(), s.nums());
    assert_eq!(next.time(), 0.05);
}

#[test]
fn concurrent_flows_on_one_fluent_are_rejected() {
    let mut s = FluentSchema::new();
    let x = s.declare_num("x", Unit::Meters).unwrap();
    let p1 = ProcessDef::new("p1", BoolExpr::Lit(true), vec![(x.clone(), NumExpr::lit(1.0))]);
    let p2 = ProcessDef::new("p2", BoolExpr::Lit(true), vec![(x.clone(), NumExpr::lit(2.0))]);
    let err = advance(State::zeroed(&s), &[p1, p2], 0.1).unwrap_err();
    assert!(matches!(err, ModelError::DuplicateFlow { .. }));
}

#[test]
fn increasing_angle_tick() {
    let t = toy();
    let s = tick(t.problem.initial().clone(), &t.problem, Decision::Wait).unwrap();
    assert_eq!(s.get(&t.angle), 0.5);
}

#[test]
fn action_effects_precede_first_flight_step() {
    let t = toy();
    let mut s = t.problem.initial().clone();
    s.set(&t.angle, 45.0);
    let after = tick(s.clone(), &t.problem, Decision::Act(0)).unwrap();
    let vy0 = 70.0 * crate::expr::approx_sin(45.0).unwrap();
    let vx0 = 70.0 * crate::expr::approx_cos(45.0 * std::f64::consts::PI / 180.0).unwrap();
    assert_eq!(after.get(&t.vx), vx0);
    assert_eq!(after.get(&t.vy), vy0 + (-9.8) * 0.05);
    assert_eq!(after.get(&t.x), vx0 * 0.05);
    assert_eq!(after.get(&t.y), 5.0 + vy0 * 0.05);
    // angle process stopped once released
    assert_eq!(after.get(&t.angle), 45.0);
}

#[test]
fn inapplicable_action_errors() {
    let t = toy();
    let s = tick(t.problem.initial().clone(), &t.problem, Decision::Act(0)).unwrap();
    let err = tick(s, &t.problem, Decision::Act(0)).unwrap_err();
    assert_eq!(err, ModelError::InapplicableAction("release".into()));
}

#[test]
fn goal_satisfied_state_still_fires_events() {
    let t = toy();
    let p = t.problem.with_goal(BoolExpr::Lit(true)).unwrap();
    let mut s = p.initial().clone();
    s.set(&t.y, -1.0);
    let (_, fired) = tick_logged(s, &p, Decision::Wait).unwrap();
    assert_eq!(fired, vec![0]);
}

#[test]
fn problem_rejects_bad_dt_and_foreign_fluents() {
    let t = toy();
    assert!(t.problem.with_dt(0.0).is_err());
    assert!(t.problem.with_horizon(0).is_err());
    let foreign = NumFluent {
        slot: 99,
        name: "nope".into(),
    };
    assert!(matches!(
        t.problem.with_goal(NumExpr::fluent(&foreign).gt(NumExpr::lit(0.0))),
        Err(ModelError::UnknownFluent(_))
    ));
}

#[test]
fn trace_line_format() {
    let t = toy();
    let s0 = t.problem.initial().clone();
    let (s1, fired) = tick_logged(s0.clone(), &t.problem, Decision::Wait).unwrap();
    let log = TickLog {
        time: s1.time(),
        decision: t.problem.decision_label(Decision::Wait).to_string(),
        fired: fired.iter().map(|&i| t.problem.events()[i].name.clone()).collect(),
        changes: changed_fluents(t.problem.schema(), &s0, &s1),
    };
    assert_eq!(log.to_string(), "t=0.0500 decision=wait fired=[] angle=0.5");
}

proptest! {
    #[test]
    fn tick_is_deterministic_and_time_monotone(
        release_at in 0u64..40,
        y0 in 0.5f64..20.0,
        ticks in 1u64..120,
    ) {
        let t = toy();
        let mut s = t.problem.initial().clone();
        s.set(&t.y, y0);
        let run = |mut s: State| {
            for k in 0..ticks {
                let d = if k == release_at { Decision::Act(0) } else { Decision::Wait };
                let before = s.time();
                s = tick(s, &t.problem, d).unwrap();
                prop_assert!(s.time() > before);
                prop_assert_eq!(s.ticks(), k + 1);
            }
            Ok(s)
        };
        let a = run(s.clone())?;
        let b = run(s)?;
        prop_assert!(a.bit_eq(&b));
    }

    #[test]
    fn events_are_quiescent_after_tick(y0 in -5.0f64..5.0, vy0 in -30.0f64..30.0) {
        let t = toy();
        let mut s = t.problem.initial().clone();
        s.set_bool(&t.released, true);
        s.set(&t.y, y0);
        s.set(&t.vy, vy0);
        let s = tick(s, &t.problem, Decision::Wait).unwrap();
        for e in t.problem.events() {
            prop_assert!(!e.precondition.eval(&s).unwrap());
        }
    }
}
