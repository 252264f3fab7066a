//! End-to-end runs over the checked-in fixture levels.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use slingplan::io::{load_level_dir, parse_level, read_level, level_to_json};
use slingplan::planner::{cascade, CascadeConfig, Plan, StageTag};
use slingplan::sim::{agent_loop, execute, AgentConfig, ExecConfig};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn coverage_plans() -> Vec<Plan> {
    Plan::parse_many(&std::fs::read_to_string(fixture("coverage.plan")).unwrap()).unwrap()
}

#[test]
fn fixtures_round_trip() {
    for item in load_level_dir(&fixture("")).unwrap() {
        assert_eq!(parse_level(&level_to_json(&item.level)).unwrap(), item.level, "{}", item.id);
    }
}

#[test]
fn cascade_tags_per_fixture() {
    let cfg = CascadeConfig::default();
    for (name, tag) in [
        ("exposed.json", StageTag::SingleShot),
        ("walled.json", StageTag::SingleShotNoBlocks),
        ("enclosed.json", StageTag::DefaultAction),
    ] {
        let d = cascade(&read_level(&fixture(name)).unwrap(), &cfg).unwrap();
        assert_eq!(d.plan.stage, tag, "{name}");
    }
}

#[test]
fn coverage_trace_is_golden() {
    let level = read_level(&fixture("coverage.json")).unwrap();
    let ex = execute(&level, &coverage_plans(), &ExecConfig::default()).unwrap();
    let golden = include_str!("golden/coverage_trace.txt");
    assert_eq!(ex.trace.to_string(), golden);
    let kinds: BTreeSet<&str> = ex.trace.fired().map(|e| e.split('[').next().unwrap()).collect();
    assert_eq!(kinds.len(), 15, "{kinds:?}");
}

#[test]
fn coverage_replay_is_deterministic() {
    let level = read_level(&fixture("coverage.json")).unwrap();
    let a = execute(&level, &coverage_plans(), &ExecConfig::default()).unwrap();
    let b = execute(&level, &coverage_plans(), &ExecConfig::default()).unwrap();
    assert!(a.trace.bit_eq(&b.trace));
    assert_eq!(a.score, b.score);
}

#[test]
fn agent_on_generated_level_replays_identically() {
    let level = slingplan::io::generate_level(21, &Default::default()).unwrap();
    let rep = agent_loop(&level, &AgentConfig::default()).unwrap();
    let plans: Vec<Plan> = rep.shots.iter().map(|s| s.plan.clone()).collect();
    let ex = execute(&level, &plans, &ExecConfig::default()).unwrap();
    assert!(ex.trace.bit_eq(&rep.execution.trace));
    assert_eq!(ex.score, rep.execution.score);
}
