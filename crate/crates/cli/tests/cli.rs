use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slingplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn plan_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let o = run(&["plan", path(&fixture("exposed.json")), "--stage", "single", "--out", path(&plan)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&plan).unwrap();
    assert!(text.starts_with("stage=single-shot dt=0.05\n"), "{text}");
    let parsed = slingplan::planner::Plan::parse(&text).unwrap();
    assert_eq!(parsed.to_string(), text);

    let o = run(&["simulate", path(&fixture("exposed.json")), path(&plan)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("solved=true shots=1"), "{}", stdout(&o));
}

#[test]
fn cascade_plan_goes_to_stdout() {
    let o = run(&["plan", path(&fixture("walled.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("stage=single-shot-no-blocks"));
}

#[test]
fn unsolved_plan_exits_one() {
    let o = run(&["plan", path(&fixture("enclosed.json")), "--stage", "noblocks", "--timeout", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("frontier exhausted"), "{}", stderr(&o));
    // the cascade still hands back the fallback shot
    let o = run(&["plan", path(&fixture("enclosed.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("stage=default-action"));
}

#[test]
fn agent_exit_codes() {
    assert_eq!(run(&["agent", path(&fixture("exposed.json"))]).status.code(), Some(0));
    let o = run(&["agent", path(&fixture("walled.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("stage=single-shot-no-blocks"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"slingshot": {"x": 10, "y": 5}, "birds": [{"id": 0}], "pigs": [],
            "blocks": [{"x": 1, "y": 1, "width": 1, "height": 1, "material": "metal"}]}"#,
    )
    .unwrap();
    let o = run(&["plan", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("blocks[0].material"), "{}", stderr(&o));

    assert_eq!(run(&["agent", "/no/such/level.json"]).status.code(), Some(2));
    assert_eq!(run(&["plan", path(&fixture("exposed.json")), "--dt", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let plan = dir.path().join("plan.txt");
    fs::write(&plan, "stage=full dt=0.05\ntick=1 action=pa-twang[b9]\n").unwrap();
    assert_eq!(run(&["simulate", path(&fixture("exposed.json")), path(&plan)]).status.code(), Some(2));

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = run(&["bench", path(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["gen", "--seed", "42", "--pigs", "3", "--blocks", "5", "--out", path(p)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let level = slingplan::io::read_level(&a).unwrap();
    assert_eq!(level.pigs.len(), 3);
    assert_eq!(
        run(&["gen", "--seed", "1", "--pigs", "0", "--blocks", "0", "--out", path(&a)]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_trace_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let o = run(&[
        "simulate",
        path(&fixture("coverage.json")),
        path(&fixture("coverage.plan")),
        "--trace",
        path(&trace),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/coverage_trace.txt");
    assert_eq!(fs::read_to_string(trace).unwrap(), fs::read_to_string(golden).unwrap());
}

#[test]
fn bench_generated_suite_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let o = run(&["bench", "--generate", "3", "--seed", "5", "--csv", path(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = slingplan::io::parse_csv(fs::File::open(&csv).unwrap()).unwrap();
    let ids: Vec<&str> = rows.iter().map(|r| r.level_id.as_str()).collect();
    assert_eq!(ids, ["gen-000005", "gen-000006", "gen-000007"]);
    assert!(stderr(&o).contains("levels: 3"));
}

#[test]
fn bench_directory() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["exposed.json", "walled.json"] {
        fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let o = run(&["bench", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("level_id,solved,score,shots,stage_tags,plan_ms"));
    assert!(lines.next().unwrap().starts_with("exposed,true,5000,1,single-shot,"));
    assert!(lines.next().unwrap().starts_with("walled,false,0,1,single-shot-no-blocks,"));
}
