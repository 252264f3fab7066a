use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};

use slingplan::domain::{single_shot, strip_blocks, translate, DomainProblem, Level};
use slingplan::io::{
    generate_level, generate_suite, load_level_dir, read_level, run_benchmark, write_csv, write_level, BenchConfig,
    GenParams,
};
use slingplan::planner::{cascade, solve, CascadeConfig, Plan, SearchConfig, StageTag};
use slingplan::sim::{agent_loop, execute, AgentConfig, ExecConfig};

/// Plans and plays slingshot levels.
#[derive(Parser)]
#[command(name = "slingplan", version)]
struct Cli {
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan the next shot. Without --stage, runs the full fallback cascade.
    Plan(PlanArgs),
    /// Replay plans against a level and report the score.
    Simulate {
        level: PathBuf,
        /// One or more plans, one per shot.
        plan: PathBuf,
        /// Write the per-tick trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Plan and play every bird of a level.
    Agent {
        level: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the agent over a directory of levels or a generated suite.
    Bench(BenchArgs),
    /// Generate a random level.
    Gen(GenArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Per-stage search timeout, seconds.
    #[arg(long, value_name = "S")]
    timeout: Option<f64>,
    /// Step size, seconds.
    #[arg(long, value_name = "D")]
    dt: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Full,
    Single,
    Noblocks,
}

#[derive(Args)]
struct PlanArgs {
    level: PathBuf,
    #[arg(long, value_enum)]
    stage: Option<Stage>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of level files.
    #[arg(required_unless_present = "generate", conflicts_with = "generate")]
    dir: Option<PathBuf>,
    /// Generate this many levels instead, seeds S, S+1, ...
    #[arg(long, value_name = "N", requires = "seed")]
    generate: Option<usize>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Planning budget per level, seconds.
    #[arg(long, default_value_t = 60.0)]
    budget: f64,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = GenParams::default().n_pigs)]
    pigs: usize,
    #[arg(long, default_value_t = GenParams::default().n_blocks)]
    blocks: usize,
    #[arg(long, default_value_t = GenParams::default().n_platforms)]
    platforms: usize,
    #[arg(long, default_value_t = GenParams::default().n_birds)]
    birds: usize,
    /// Chance each pig gets a column or a wall.
    #[arg(long, default_value_t = GenParams::default().structure_probability)]
    structure_probability: f64,
    #[arg(long)]
    out: PathBuf,
}

fn seconds(name: &str, s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .with_context(|| format!("--{name} must be a positive number of seconds, got {s}"))
}

impl SearchArgs {
    fn cascade(&self) -> Result<CascadeConfig> {
        let mut cfg = CascadeConfig::default();
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                bail!("--dt must be positive, got {dt}");
            }
            cfg = cfg.with_dt(dt);
        }
        if let Some(t) = self.timeout {
            cfg = cfg.with_timeouts(seconds("timeout", t)?);
        }
        Ok(cfg)
    }
}

fn load(path: &Path) -> Result<Level> {
    Ok(read_level(path)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn plan_cmd(args: &PlanArgs) -> Result<bool> {
    let level = load(&args.level)?;
    let cfg = args.search.cascade()?;
    let Some(stage) = args.stage else {
        let d = cascade(&level, &cfg)?;
        for a in &d.attempts {
            info!("{}: {:?} in {:?}", a.stage, a.failure, a.elapsed);
        }
        emit(args.out.as_deref(), &d.plan.to_string())?;
        return Ok(d.plan.stage != StageTag::DefaultAction);
    };
    let full: DomainProblem = translate(&level, &cfg.domain)?;
    let (dp, tag, timeout) = match stage {
        Stage::Full => (full, StageTag::Full, cfg.single_shot_timeout),
        Stage::Single => (single_shot(&full), StageTag::SingleShot, cfg.single_shot_timeout),
        Stage::Noblocks => (
            strip_blocks(&single_shot(&full)),
            StageTag::SingleShotNoBlocks,
            cfg.no_blocks_timeout,
        ),
    };
    let search = SearchConfig { timeout, ..cfg.search };
    let out = solve(dp.problem(), &search, tag)?;
    info!("{tag}: {:?} after {:?}", out.stats, out.elapsed);
    match out.plan {
        Some(p) => {
            emit(args.out.as_deref(), &p.to_string())?;
            Ok(true)
        }
        None => {
            let why = out.reason.map_or("unsolved", |r| r.as_str());
            eprintln!("no plan: {why} after {:.3} s", out.elapsed.as_secs_f64());
            Ok(false)
        }
    }
}

fn simulate_cmd(level: &Path, plan: &Path, trace: Option<&Path>) -> Result<bool> {
    let level = load(level)?;
    let text = fs::read_to_string(plan).with_context(|| format!("reading {}", plan.display()))?;
    let plans = Plan::parse_many(&text).with_context(|| format!("parsing {}", plan.display()))?;
    let ex = execute(&level, &plans, &ExecConfig::default())?;
    if let Some(t) = trace {
        fs::write(t, ex.trace.to_string()).with_context(|| format!("writing {}", t.display()))?;
    }
    println!("solved={} shots={} {}", ex.solved, ex.trace.shots.len(), ex.score);
    Ok(true)
}

fn agent_cmd(level: &Path, search: &SearchArgs, trace: Option<&Path>) -> Result<bool> {
    let level = load(level)?;
    let cfg = AgentConfig {
        cascade: search.cascade()?,
        ..AgentConfig::default()
    };
    let rep = agent_loop(&level, &cfg)?;
    for (i, s) in rep.shots.iter().enumerate() {
        let tick = s.plan.steps.first().map_or(0, |st| st.tick);
        println!(
            "shot {i}: stage={} tick={tick} pigs_killed={} plan_ms={:.1}",
            s.plan.stage,
            s.pigs_killed,
            s.plan_time.as_secs_f64() * 1000.0
        );
    }
    if let Some(t) = trace {
        fs::write(t, rep.execution.trace.to_string()).with_context(|| format!("writing {}", t.display()))?;
    }
    println!("solved={} {}", rep.execution.solved, rep.execution.score);
    Ok(rep.execution.solved)
}

fn bench_cmd(args: &BenchArgs) -> Result<bool> {
    let levels = match (&args.dir, args.generate, args.seed) {
        (Some(dir), _, _) => load_level_dir(dir)?,
        (None, Some(n), Some(seed)) => generate_suite(n, seed, &GenParams::default())?,
        _ => bail!("give a level directory or --generate N --seed S"),
    };
    let cfg = BenchConfig {
        agent: AgentConfig {
            cascade: args.search.cascade()?,
            budget: Some(seconds("budget", args.budget)?),
            ..AgentConfig::default()
        },
    };
    let rep = run_benchmark(&levels, &cfg)?;
    if let Some(path) = &args.csv {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&rep.rows, f)?;
    } else {
        write_csv(&rep.rows, std::io::stdout())?;
    }
    let (solved, total) = rep.exposed_solved();
    eprint!("{}", rep.summary);
    eprintln!("exposed-pig levels solved: {solved}/{total}");
    Ok(true)
}

fn gen_cmd(args: &GenArgs) -> Result<bool> {
    let params = GenParams {
        n_pigs: args.pigs,
        n_blocks: args.blocks,
        n_platforms: args.platforms,
        n_birds: args.birds,
        structure_probability: args.structure_probability,
    };
    let level = generate_level(args.seed, &params)?;
    write_level(&args.out, &level)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let result = match &cli.command {
        Command::Plan(a) => plan_cmd(a),
        Command::Simulate { level, plan, trace } => simulate_cmd(level, plan, trace.as_deref()),
        Command::Agent { level, search, trace } => agent_cmd(level, search, trace.as_deref()),
        Command::Bench(a) => bench_cmd(a),
        Command::Gen(a) => gen_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
