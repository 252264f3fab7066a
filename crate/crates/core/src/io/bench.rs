use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Duration;

use log::{info, warn};

use crate::domain::Level;
use crate::io::{file_error, generate_level, read_level, GenParams, IoError};
use crate::planner::StageTag;
use crate::sim::{agent_loop, oracle_hit, AgentConfig, OracleConfig, SimError};

pub const CSV_HEADER: [&str; 6] = ["level_id", "solved", "score", "shots", "stage_tags", "plan_ms"];

/// Written in the `stage_tags` column of a level the agent failed on.
const ERROR_TAG: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchLevel {
    pub id: String,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub agent: AgentConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            agent: AgentConfig {
                budget: Some(Duration::from_secs(60)),
                ..AgentConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub level_id: String,
    pub solved: bool,
    pub score: u64,
    pub shots: usize,
    pub stage_tags: Vec<StageTag>,
    /// Planning time per shot, ms.
    pub plan_ms: Vec<f64>,
    /// Why the agent gave up on the level. Only `"error"` survives a CSV
    /// round trip.
    pub error: Option<String>,
}

impl BenchmarkRow {
    fn failed(level_id: String, message: String) -> Self {
        BenchmarkRow {
            level_id,
            solved: false,
            score: 0,
            shots: 0,
            stage_tags: Vec::new(),
            plan_ms: Vec::new(),
            error: Some(message),
        }
    }
}

/// Totals over a batch, all recomputable from its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub levels: usize,
    pub solved: usize,
    pub mean_score: f64,
    pub shots: usize,
    /// Shots per stage that planned them.
    pub stage_counts: BTreeMap<StageTag, usize>,
    pub errors: usize,
}

impl Summary {
    pub fn from_rows(rows: &[BenchmarkRow]) -> Self {
        let mut stage_counts: BTreeMap<StageTag, usize> = StageTag::ALL.iter().map(|&t| (t, 0)).collect();
        for tag in rows.iter().flat_map(|r| &r.stage_tags) {
            *stage_counts.entry(*tag).or_default() += 1;
        }
        let total: u64 = rows.iter().map(|r| r.score).sum();
        Summary {
            levels: rows.len(),
            solved: rows.iter().filter(|r| r.solved).count(),
            mean_score: if rows.is_empty() {
                0.0
            } else {
                total as f64 / rows.len() as f64
            },
            shots: rows.iter().map(|r| r.shots).sum(),
            stage_counts,
            errors: rows.iter().filter(|r| r.error.is_some()).count(),
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "levels: {}", self.levels)?;
        writeln!(f, "solved: {}", self.solved)?;
        writeln!(f, "mean score: {:.1}", self.mean_score)?;
        writeln!(f, "shots: {}", self.shots)?;
        for (tag, n) in &self.stage_counts {
            writeln!(f, "shots by {tag}: {n}")?;
        }
        writeln!(f, "errors: {}", self.errors)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// In level-id order.
    pub rows: Vec<BenchmarkRow>,
    pub summary: Summary,
    /// Levels with no blocks, at least as many birds as pigs, and every pig
    /// hittable on its own according to the oracle.
    pub exposed: BTreeSet<String>,
}

impl BenchReport {
    /// `(solved, total)` over the certified exposed-pig levels.
    pub fn exposed_solved(&self) -> (usize, usize) {
        let solved = self
            .rows
            .iter()
            .filter(|r| r.solved && self.exposed.contains(&r.level_id))
            .count();
        (solved, self.exposed.len())
    }
}

/// True when the level is solvable shot by shot: no blocks, a bird per pig,
/// and each pig struck by some release when alone in the level. Any release
/// that strikes a pig alone still strikes some pig when others are around,
/// so every shot can kill.
pub fn certify_exposed(level: &Level, cfg: &OracleConfig) -> Result<bool, SimError> {
    if !level.blocks.is_empty() || level.birds.len() < level.pigs.len() {
        return Ok(false);
    }
    for p in &level.pigs {
        let alone = Level {
            pigs: vec![p.clone()],
            ..level.clone()
        };
        if oracle_hit(&alone, 0, cfg)?.hits.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn run_one(item: &BenchLevel, cfg: &BenchConfig) -> BenchmarkRow {
    match agent_loop(&item.level, &cfg.agent) {
        Ok(rep) => BenchmarkRow {
            level_id: item.id.clone(),
            solved: rep.execution.solved,
            score: rep.execution.score.total,
            shots: rep.shots.len(),
            stage_tags: rep.stage_tags(),
            plan_ms: rep.shots.iter().map(|s| s.plan_time.as_secs_f64() * 1000.0).collect(),
            error: None,
        },
        Err(e) => {
            warn!("{}: {e}", item.id);
            BenchmarkRow::failed(item.id.clone(), e.to_string())
        }
    }
}

/// Plays every level with the agent, one after another.
pub fn run_benchmark(levels: &[BenchLevel], cfg: &BenchConfig) -> Result<BenchReport, IoError> {
    if levels.is_empty() {
        return Err(IoError::EmptyLevelSet);
    }
    let ocfg = OracleConfig::from(&cfg.agent.cascade.domain);
    let mut order: Vec<&BenchLevel> = levels.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut rows = Vec::with_capacity(levels.len());
    let mut exposed = BTreeSet::new();
    for item in order {
        let row = run_one(item, cfg);
        info!(
            "{}: solved={} score={} tags={}",
            row.level_id,
            row.solved,
            row.score,
            tags_field(&row)
        );
        if certify_exposed(&item.level, &ocfg).unwrap_or(false) {
            exposed.insert(item.id.clone());
        }
        rows.push(row);
    }
    let summary = Summary::from_rows(&rows);
    Ok(BenchReport { rows, summary, exposed })
}

/// Levels `seed, seed + 1, ...`, named so that id order is seed order.
pub fn generate_suite(n: usize, seed: u64, params: &GenParams) -> Result<Vec<BenchLevel>, IoError> {
    (0..n as u64)
        .map(|i| {
            let s = seed + i;
            Ok(BenchLevel {
                id: format!("gen-{s:06}"),
                level: generate_level(s, params)?,
            })
        })
        .collect()
}

/// Every `*.json` file in `dir`, named by file stem.
pub fn load_level_dir(dir: &Path) -> Result<Vec<BenchLevel>, IoError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| file_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            Ok(BenchLevel {
                id: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                level: read_level(p)?,
            })
        })
        .collect()
}

fn tags_field(row: &BenchmarkRow) -> String {
    if row.error.is_some() {
        return ERROR_TAG.to_string();
    }
    row.stage_tags.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(";")
}

fn csv_error(e: csv::Error) -> IoError {
    IoError::Csv(e.to_string())
}

/// One row per level; list columns are `;`-separated.
pub fn write_csv<W: Write>(rows: &[BenchmarkRow], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in rows {
        let ms: Vec<String> = r.plan_ms.iter().map(|m| format!("{m:.1}")).collect();
        w.write_record([
            r.level_id.clone(),
            r.solved.to_string(),
            r.score.to_string(),
            r.shots.to_string(),
            tags_field(r),
            ms.join(";"),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| IoError::Csv(e.to_string()))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').filter(|x| !x.is_empty())
}

/// Reads back what [`write_csv`] wrote.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<BenchmarkRow>, IoError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(IoError::Csv(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let bad = |col: &str| IoError::Csv(format!("row {}: bad {col}", i + 1));
        let tags = &rec[4];
        let (stage_tags, error) = if tags == ERROR_TAG {
            (Vec::new(), Some(ERROR_TAG.to_string()))
        } else {
            let t = split_list(tags)
                .map(|t| t.parse::<StageTag>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad("stage_tags"))?;
            (t, None)
        };
        rows.push(BenchmarkRow {
            level_id: rec[0].to_string(),
            solved: rec[1].parse().map_err(|_| bad("solved"))?,
            score: rec[2].parse().map_err(|_| bad("score"))?,
            shots: rec[3].parse().map_err(|_| bad("shots"))?,
            stage_tags,
            plan_ms: split_list(&rec[5])
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad("plan_ms"))?,
            error,
        });
    }
    Ok(rows)
}
