use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cliquetree::format::{parse_graph, parse_state_space, write_graph, write_state_space, write_td};
use cliquetree::pipeline::{self, Config, Mode, SizeDistribution};
use cliquetree::{Error, Graph, Jump, StateSpace};

macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout(), $($arg)*)
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)
    };
}

#[derive(Parser)]
#[command(name = "cliquetree", version, about = "Junction trees with a bounded largest clique")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a graph and report its junction tree.
    Triangulate(TriangulateArgs),
    /// Compare the recursive triangulation with enhanced greedy elimination.
    Compare(CompareArgs),
    /// Check a run against the exact cliquewidth (at most 16 vertices).
    Verify(VerifyArgs),
    /// Generate a random graph and state-space file.
    Gen(GenArgs),
    /// Distribution of l - k over random graphs.
    Delta(DeltaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Card,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum JumpArg {
    Inc,
    Kstar,
    Margin,
}

impl From<JumpArg> for Jump {
    fn from(j: JumpArg) -> Self {
        match j {
            JumpArg::Inc => Jump::Increment,
            JumpArg::Kstar => Jump::KStar,
            JumpArg::Margin => Jump::WeightedMargin,
        }
    }
}

#[derive(Args)]
struct RunFlags {
    /// Cut approximation factor.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Threshold on clique size or on log2 state space; weighted by default
    /// when a state-space file is given.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Next-threshold rule after a failed round.
    #[arg(long, value_enum, default_value = "inc")]
    jump: JumpArg,
}

impl RunFlags {
    fn config(&self, has_states: bool) -> Config {
        let mode = match (self.mode, has_states) {
            (Some(ModeArg::Card), _) | (None, false) => Mode::Cardinality,
            (Some(ModeArg::Weighted), _) | (None, true) => Mode::Weighted,
        };
        Config {
            alpha: self.alpha,
            mode,
            jump: self.jump.into(),
            ..Config::default()
        }
    }
}

#[derive(Args)]
struct TriangulateArgs {
    graph: PathBuf,
    /// `<v> <size>` lines; unlisted vertices have 2 states.
    #[arg(long)]
    states: Option<PathBuf>,
    #[command(flatten)]
    run: RunFlags,
    /// Keep every fill edge.
    #[arg(long)]
    no_minimize: bool,
    /// Join the junction trees of separate components into one tree.
    #[arg(long)]
    force_tree: bool,
    /// Write the junction tree in `.td` format.
    #[arg(long)]
    emit_td: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SizeFlags {
    /// State sizes are drawn from `LO..HI`.
    #[arg(long, default_value = "3..21", value_parser = parse_range)]
    sizes: (u64, u64),
    /// Skew sizes toward the low end with this mean.
    #[arg(long)]
    mean: Option<f64>,
}

impl SizeFlags {
    fn distribution(&self) -> SizeDistribution {
        let (lo, hi) = self.sizes;
        match self.mean {
            Some(mean) => SizeDistribution::Skewed { lo, hi, mean },
            None => SizeDistribution::Uniform { lo, hi },
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    graph: PathBuf,
    /// Use these sizes for a single trial instead of random ones.
    #[arg(long)]
    states: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    sizes: SizeFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    graph: PathBuf,
    #[arg(long)]
    states: Option<PathBuf>,
    #[command(flatten)]
    run: RunFlags,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    sizes: SizeFlags,
    /// Graph output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// State-space output path.
    #[arg(long)]
    states_out: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long, default_value_t = 100)]
    graphs: usize,
    #[arg(long, default_value_t = 43)]
    n: usize,
    #[arg(long, default_value_t = 110)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "inc")]
    jump: JumpArg,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    Ok((lo, hi))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(graph: &Path, states: Option<&Path>) -> anyhow::Result<(Graph, Option<StateSpace>)> {
    let g = parse_graph(&read(graph)?).with_context(|| format!("parsing {}", graph.display()))?;
    let ss = match states {
        Some(p) => Some(parse_state_space(&read(p)?, &g).with_context(|| format!("parsing {}", p.display()))?),
        None => None,
    };
    Ok((g, ss))
}

fn triangulate(args: TriangulateArgs) -> anyhow::Result<()> {
    let (g, ss) = load(&args.graph, args.states.as_deref())?;
    let cfg = Config {
        minimize: !args.no_minimize,
        force_tree: args.force_tree,
        ..args.run.config(ss.is_some())
    };
    let mut out = pipeline::run(&g, ss.as_ref(), &cfg)?;
    out.report.input = args.graph.display().to_string();
    if let Some(path) = &args.emit_td {
        fs::write(path, write_td(&out.junction_tree, g.n())).with_context(|| format!("writing {}", path.display()))?;
    }
    let r = &out.report;
    if args.json {
        outln!("{}", serde_json::to_string_pretty(r)?)?;
        return Ok(());
    }
    outln!("input         {}", r.input)?;
    outln!("vertices      {}  edges {}  simplicial {}", r.n, r.m, r.simplicial)?;
    outln!("threshold     {}  (lower bound {})", r.k_accepted, r.lower_bound)?;
    outln!("largest bag   {}  heaviest {:.4}", r.l, r.heaviest)?;
    match r.ratio_bound {
        Some(b) => outln!("ratio bound   {b:.4}")?,
        None => outln!("ratio bound   -")?,
    }
    outln!("M             {:.4}", r.heaviest_log_states)?;
    outln!("T             {:.4}", r.total_log_states)?;
    outln!("bags          {}", r.bags)?;
    outln!("fill edges    {} -> {}", r.fills_before, r.fills_after)?;
    outln!("time          {} ms", r.wall_ms)?;
    Ok(())
}

fn compare(args: CompareArgs) -> anyhow::Result<()> {
    let (g, ss) = load(&args.graph, args.states.as_deref())?;
    let cfg = Config {
        alpha: args.alpha,
        mode: Mode::Weighted,
        ..Config::default()
    };
    let results = match &ss {
        Some(ss) => vec![pipeline::compare_instance(&g, ss, &cfg)?],
        None => pipeline::compare_trials(&g, args.sizes.distribution(), args.trials, args.seed, &cfg)?,
    };
    let table = pipeline::tabulate(&results);
    if args.json {
        outln!("{}", serde_json::to_string_pretty(&table)?)?;
    } else {
        out!("{table}")?;
        let worst = results
            .iter()
            .map(|c| c.greedy.total - c.recursive.total)
            .fold(f64::NEG_INFINITY, f64::max);
        outln!("largest T gap (greedy - recursive): {worst:.2}")?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let (g, ss) = load(&args.graph, args.states.as_deref())?;
    let v = pipeline::verify(&g, ss.as_ref(), &args.run.config(ss.is_some()))?;
    if args.json {
        outln!("{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        outln!("oracle        {}", v.oracle)?;
        outln!("accepted      {}", v.k_accepted)?;
        match v.failed_at {
            Some(f) => outln!("failed at     {f}")?,
            None => outln!("failed at     -")?,
        }
        outln!("l             {}", v.l)?;
        outln!("chordal       {}", v.chordal)?;
        outln!("bound holds   {}", v.bound_holds)?;
        outln!("sound         {}", v.sound)?;
    }
    Ok(v.holds())
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let (g, ss) = pipeline::generate(args.n, args.m, args.sizes.distribution(), args.seed)?;
    let text = write_graph(&g)?;
    match &args.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out!("{text}")?,
    }
    if let Some(p) = &args.states_out {
        fs::write(p, write_state_space(&ss)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn delta(args: DeltaArgs) -> anyhow::Result<()> {
    if args.graphs == 0 {
        bail!("--graphs must be positive");
    }
    let cfg = Config {
        jump: args.jump.into(),
        ..Config::default()
    };
    let mut runs = Vec::with_capacity(args.graphs);
    for i in 0..args.graphs {
        let sizes = SizeDistribution::Uniform { lo: 2, hi: 2 };
        let (g, _) = pipeline::generate(args.n, args.m, sizes, args.seed.wrapping_add(i as u64))?;
        let r = pipeline::run(&g, None, &cfg)?.report;
        runs.push((r.l, r.k_accepted as usize));
    }
    outln!("{}", pipeline::delta_sentence(&pipeline::delta_histogram(runs)))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Triangulate(a) => triangulate(a).map(|_| true),
        Command::Compare(a) => compare(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Delta(a) => delta(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.downcast_ref::<Error>().is_some_and(Error::is_internal);
            ExitCode::from(if internal { 3 } else { 1 })
        }
    }
}
