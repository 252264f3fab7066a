use std::time::{Duration, Instant};

use proptest::prelude::*;

use super::*;
use crate::domain::{
    single_shot, translate, Bird, BirdKind, Block, DomainConfig, DomainProblem, Level, Material, Physics, Pig, Platform,
    Point,
};
use crate::model::{FluentSchema, State, Unit};

fn level(pigs: Vec<Pig>, blocks: Vec<Block>, platforms: Vec<Platform>) -> Level {
    Level {
        slingshot: Point { x: 10.0, y: 5.0 },
        birds: vec![Bird {
            id: 0,
            kind: BirdKind::Red,
            mass: 1.0,
        }],
        pigs,
        blocks,
        platforms,
        physics: Physics::default(),
    }
}

fn pig(x: f64, y: f64) -> Pig {
    Pig {
        x,
        y,
        radius: 0.5,
        mass: 1.0,
    }
}

fn plat(x: f64, y: f64, w: f64, h: f64) -> Platform {
    Platform {
        x,
        y,
        width: w,
        height: h,
    }
}

fn ss(l: &Level) -> DomainProblem {
    single_shot(&translate(l, &DomainConfig::default()).unwrap())
}

#[test]
fn quantize_snaps_positions_but_not_booleans() {
    let mut s = FluentSchema::new();
    let x = s.declare_num("x", Unit::Meters).unwrap();
    let flag = s.declare_bool("flag").unwrap();
    let g = Grids::default();
    let mut a: State = State::zeroed(&s);
    a.set(&x, 3.0);
    let mut b = a.clone();
    b.set(&x, 3.0 + 1e-9);
    assert_eq!(quantize(&a, &s, &g), quantize(&b, &s, &g));
    b.set(&x, 3.2);
    assert_ne!(quantize(&a, &s, &g), quantize(&b, &s, &g));
    let mut c = a.clone();
    c.set_bool(&flag, true);
    assert_ne!(quantize(&a, &s, &g), quantize(&c, &s, &g));
}

#[test]
fn no_pigs_gives_empty_plan() {
    let dp = translate::<f64>(&level(vec![], vec![], vec![]), &DomainConfig::default()).unwrap();
    let out = solve(dp.problem(), &SearchConfig::default(), StageTag::Full).unwrap();
    let plan = out.plan.unwrap();
    assert!(plan.steps.is_empty());
    assert_eq!(out.goal_tick, Some(0));
}

#[test]
fn exposed_pig_single_release() {
    let dp = ss(&level(vec![pig(80.0, 0.5)], vec![], vec![]));
    let t = Instant::now();
    let out = solve(dp.problem(), &SearchConfig::default(), StageTag::SingleShot).unwrap();
    eprintln!("exposed pig solved in {:?}: {:?}", t.elapsed(), out.stats);
    let plan = out.plan.unwrap();
    assert_eq!(plan.steps.len(), 1);
    assert_eq!(plan.steps[0].action, "pa-twang[b0]");
    let (k, s) = replay_to_goal(dp.problem(), &plan, 1200).unwrap().unwrap();
    assert_eq!(Some(k), out.goal_tick);
    assert_eq!(s.get(&dp.index().globals.pigs_killed), 1.0);
}

#[test]
fn enclosed_pig_exhausts_frontier() {
    let walls = vec![
        plat(56.0, 4.0, 4.0, 8.0),
        plat(64.0, 4.0, 4.0, 8.0),
        plat(60.0, 10.0, 12.0, 4.0),
    ];
    let dp = ss(&level(vec![pig(60.0, 0.5)], vec![], walls));
    let out = solve(dp.problem(), &SearchConfig::default(), StageTag::SingleShot).unwrap();
    assert!(out.plan.is_none());
    assert_eq!(out.reason, Some(Unsolved::FrontierExhausted));
}

#[test]
fn short_horizon_is_reported() {
    let dp = ss(&level(vec![pig(190.0, 40.0)], vec![], vec![]));
    let cfg = SearchConfig {
        horizon: 40,
        ..SearchConfig::default()
    };
    let out = solve(dp.problem(), &cfg, StageTag::SingleShot).unwrap();
    assert_eq!(out.reason, Some(Unsolved::HorizonExhausted));
}

#[test]
fn timeout_is_honored() {
    // three birds against an unreachable pig: the full search tree explodes
    let mut l = level(vec![pig(12.0, 150.0)], vec![], vec![]);
    for id in 1..3 {
        l.birds.push(Bird {
            id,
            kind: BirdKind::Red,
            mass: 1.0,
        });
    }
    let dp = translate::<f64>(&l, &DomainConfig::default()).unwrap();
    let cfg = SearchConfig {
        timeout: Duration::from_millis(200),
        ..SearchConfig::default()
    };
    let out = solve(dp.problem(), &cfg, StageTag::Full).unwrap();
    assert_eq!(out.reason, Some(Unsolved::Timeout));
    assert!(out.elapsed <= Duration::from_millis(220), "{:?}", out.elapsed);
}

#[test]
fn dt_mismatch_is_a_config_error() {
    let dp = ss(&level(vec![pig(80.0, 0.5)], vec![], vec![]));
    let cfg = SearchConfig {
        dt: 0.1,
        ..SearchConfig::default()
    };
    assert!(matches!(
        solve(dp.problem(), &cfg, StageTag::SingleShot),
        Err(PlanError::DtMismatch { .. })
    ));
    let bad = SearchConfig {
        grids: Grids {
            position: 0.0,
            ..Grids::default()
        },
        ..SearchConfig::default()
    };
    assert!(matches!(bad.validate(), Err(PlanError::InvalidConfig(_))));
}

#[test]
fn plan_text_round_trip() {
    let plan = Plan::new(
        StageTag::SingleShotNoBlocks,
        0.05,
        vec![
            PlanStep {
                tick: 3,
                action: "pa-twang[b0]".into(),
            },
            PlanStep {
                tick: 140,
                action: "pa-twang[b1]".into(),
            },
        ],
    );
    let text = plan.to_string();
    assert_eq!(
        text,
        "stage=single-shot-no-blocks dt=0.05\ntick=3 action=pa-twang[b0]\ntick=140 action=pa-twang[b1]\n"
    );
    assert_eq!(Plan::parse(&text).unwrap(), plan);
}

#[test]
fn multi_plan_files() {
    let text = "# two shots\nstage=single-shot dt=0.05\ntick=4 action=pa-twang[b0]\n\nstage=default-action dt=0.05\ntick=90 action=pa-twang[b0]\n";
    let plans = Plan::parse_many(text).unwrap();
    assert_eq!(plans.len(), 2);
    assert_eq!(plans[1].stage, StageTag::DefaultAction);
    assert_eq!(plans[1].steps[0].tick, 90);
    let e = Plan::parse_many("stage=full dt=0.05\ntick=1 action=a\nstage=full dt=0.05\ntick=x action=a\n").unwrap_err();
    assert!(matches!(e, PlanError::Parse { line: 4, .. }), "{e:?}");
    assert!(matches!(Plan::parse_many("tick=1 action=a\n"), Err(PlanError::Parse { line: 1, .. })));
    assert!(Plan::parse_many("").is_err());
}

#[test]
fn plan_parse_errors_name_the_line() {
    let e = Plan::parse("stage=full dt=0.05\ntick=5 action=a\ntick=5 action=b\n").unwrap_err();
    assert_eq!(
        e,
        PlanError::Parse {
            line: 3,
            message: "ticks must be strictly increasing".into()
        }
    );
    assert!(matches!(Plan::parse("stage=bogus dt=0.05"), Err(PlanError::Parse { line: 1, .. })));
    assert!(matches!(Plan::parse(""), Err(PlanError::Parse { .. })));
}

#[test]
fn default_tick_is_closest_to_45() {
    let l = level(vec![pig(80.0, 0.5)], vec![], vec![]);
    assert_eq!(default_release_tick(&l, 0.05, 1200, 45.0), 90);
    assert_eq!(default_release_tick(&l, 0.05, 50, 45.0), 49);
    assert_eq!(default_release_tick(&l, 0.05, 1200, 85.0), 160);
}

#[test]
fn cascade_stages() {
    let cfg = CascadeConfig::default();
    let exposed = cascade(&level(vec![pig(80.0, 0.5)], vec![], vec![]), &cfg).unwrap();
    assert_eq!(exposed.plan.stage, StageTag::SingleShot);
    assert_eq!(exposed.attempts.len(), 1);

    let wall = Block {
        x: 45.0,
        y: 15.0,
        width: 4.0,
        height: 30.0,
        material: Material::Stone,
        explosive: false,
        life: None,
    };
    let walled = cascade(&level(vec![pig(50.0, 0.5)], vec![wall], vec![]), &cfg).unwrap();
    assert_eq!(walled.plan.stage, StageTag::SingleShotNoBlocks);
    assert_eq!(walled.attempts[0].failure, Some(Unsolved::FrontierExhausted));

    let walls = vec![
        plat(56.0, 4.0, 4.0, 8.0),
        plat(64.0, 4.0, 4.0, 8.0),
        plat(60.0, 10.0, 12.0, 4.0),
    ];
    let enclosed = cascade(&level(vec![pig(60.0, 0.5)], vec![], walls), &cfg).unwrap();
    assert_eq!(enclosed.plan.stage, StageTag::DefaultAction);
    assert_eq!(
        enclosed.plan.steps,
        [PlanStep {
            tick: 90,
            action: "pa-twang[b0]".into()
        }]
    );
    assert_eq!(enclosed.attempts.len(), 2);
}

#[test]
fn no_birds_is_a_precondition_error() {
    let mut l = level(vec![pig(80.0, 0.5)], vec![], vec![]);
    l.birds.clear();
    assert!(matches!(cascade(&l, &CascadeConfig::default()), Err(PlanError::NoBirds)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Simulating action-free stretches in one go finds the same plan as
    /// pushing every tick through the frontier.
    #[test]
    fn macro_steps_match_naive_search(
        px in 20.0f64..120.0,
        py in 0.5f64..30.0,
        with_platform in any::<bool>(),
        two_birds in any::<bool>(),
    ) {
        let platforms = if with_platform { vec![plat(px - 6.0, py + 3.0, 2.0, 6.0)] } else { vec![] };
        let mut l = level(vec![pig(px, py)], vec![], platforms);
        if two_birds {
            l.birds.push(Bird { id: 1, kind: BirdKind::Red, mass: 1.0 });
        }
        let full = translate::<f64>(&l, &DomainConfig::default()).unwrap();
        let cfg = SearchConfig { horizon: 260, ..SearchConfig::default() };
        let naive = SearchConfig { macro_steps: false, ..cfg.clone() };
        let a = solve(full.problem(), &cfg, StageTag::Full).unwrap();
        let b = solve(full.problem(), &naive, StageTag::Full).unwrap();
        prop_assert_eq!(a.plan, b.plan);
        prop_assert_eq!(a.goal_tick, b.goal_tick);
        prop_assert_eq!(a.reason, b.reason);
    }
}
