use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use polygen_core::bench::{load_benchmark, load_benchmarks, MatrixReport};
use polygen_core::oracle::LoopOutcome;
use polygen_core::text::{parse_task, serialize_program, Benchmark};
use polygen_core::{
    cegis_loop, program_size, random_loop, run_matrix, Eusolver, OracleConfig, OracleModel, PbeSolver, PolyGen,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "polygen", version, about = "Programming-by-example synthesis for conditional linear integer arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// Solver to run; repeat for `matrix`, where the first one is the reference.
    #[arg(long, value_enum, global = true)]
    solver: Vec<SolverName>,

    #[arg(long, env = "POLYGEN_SEED", default_value_t = 0, global = true)]
    seed: u64,

    #[arg(long, global = true)]
    example_cap: Option<usize>,

    /// Seconds.
    #[arg(long, global = true)]
    time_cap: Option<f64>,

    /// Write a JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Write one CSV row per oracle run here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a program from a task file.
    Solve { task: PathBuf },
    /// Counterexample-guided loop against a benchmark's target.
    Cegis { bench: PathBuf },
    /// Random-example loop against a benchmark's target.
    Random { bench: PathBuf },
    /// Every `.bench` file in a directory, for each solver, model and seed.
    Matrix {
        dir: PathBuf,
        /// Number of consecutive seeds starting at `--seed`.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = ModelChoice::Cegis)]
        model: ModelChoice,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverName {
    Polygen,
    Eusolver,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Cegis,
    Random,
    Both,
}

impl ModelChoice {
    fn models(self) -> Vec<OracleModel> {
        match self {
            ModelChoice::Cegis => vec![OracleModel::Cegis],
            ModelChoice::Random => vec![OracleModel::Random],
            ModelChoice::Both => vec![OracleModel::Cegis, OracleModel::Random],
        }
    }
}

/// Exit status 1: bad arguments or unreadable input.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn solver(name: SolverName) -> Box<dyn PbeSolver> {
    match name {
        SolverName::Polygen => Box::new(PolyGen::default()),
        SolverName::Eusolver => Box::new(Eusolver::default()),
    }
}

fn oracle_config(opts: &Opts) -> Result<OracleConfig, Usage> {
    let mut cfg = OracleConfig { rng_seed: opts.seed, ..OracleConfig::default() };
    if let Some(n) = opts.example_cap {
        if n == 0 {
            return Err(Usage("--example-cap must be positive".into()));
        }
        cfg.example_cap = n;
    }
    if let Some(t) = opts.time_cap {
        cfg.time_cap = Duration::try_from_secs_f64(t).map_err(|_| Usage(format!("invalid --time-cap {t}")))?;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct SolveReport {
    task: String,
    solver: &'static str,
    seed: u64,
    examples: usize,
    wall_time: f64,
    program_size: u64,
    success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    program: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn solve(path: &Path, opts: &Opts) -> Result<bool, Usage> {
    let src = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let task = parse_task(&src).map_err(|e| Usage(format!("{}:{e}", path.display())))?;
    let cfg = oracle_config(opts)?;
    let s = solver(opts.solver.first().copied().unwrap_or(SolverName::Polygen));
    let start = Instant::now();
    let result = s.solve(&task, opts.seed, Some(start + cfg.time_cap));
    let wall_time = start.elapsed().as_secs_f64();
    let report = SolveReport {
        task: path.display().to_string(),
        solver: s.name(),
        seed: opts.seed,
        examples: task.len(),
        wall_time,
        program_size: result.as_ref().ok().and_then(|p| program_size(p, task.grammar()).ok()).unwrap_or(0),
        success: result.is_ok(),
        program: result.as_ref().ok().map(serialize_program),
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    match &result {
        Ok(p) => println!("{}", serialize_program(p)),
        Err(e) => eprintln!("synthesis failed: {e}"),
    }
    if let Some(out) = &opts.report {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(out, json).map_err(|e| Usage(format!("{}: {e}", out.display())))?;
    }
    Ok(report.success)
}

fn write_outputs(m: &MatrixReport, opts: &Opts) -> Result<(), Usage> {
    if let Some(p) = &opts.report {
        m.write_json(p)?;
    }
    if let Some(p) = &opts.csv {
        m.write_csv(p)?;
    }
    Ok(())
}

fn single_loop(path: &Path, model: OracleModel, opts: &Opts) -> Result<bool, Usage> {
    let bench: Benchmark = load_benchmark(path)?;
    let cfg = oracle_config(opts)?;
    let s = solver(opts.solver.first().copied().unwrap_or(SolverName::Polygen));
    let run = match model {
        OracleModel::Cegis => cegis_loop,
        OracleModel::Random => random_loop,
    };
    let LoopOutcome { mut report, program, .. } = run(s.as_ref(), &bench.truth, &bench.grammar, &cfg);
    report.benchmark = bench.name.clone();
    if let Some(p) = &program {
        println!("{}", serialize_program(p));
    }
    eprintln!(
        "{} {} {} seed {}: {} after {} examples, size {}, {:.3}s{}",
        report.benchmark,
        report.solver,
        model.name(),
        report.seed,
        if report.success { "converged" } else { "failed" },
        report.examples_used,
        report.program_size,
        report.wall_time,
        report.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default(),
    );
    let ok = report.success;
    write_outputs(&MatrixReport { runs: vec![report], aggregates: vec![] }, opts)?;
    Ok(ok)
}

fn matrix(dir: &Path, seeds: u64, model: ModelChoice, threads: usize, opts: &Opts) -> Result<bool, Usage> {
    let benches = load_benchmarks(dir)?;
    if benches.is_empty() {
        return Err(Usage(format!("{}: no .bench files", dir.display())));
    }
    let cfg = oracle_config(opts)?;
    let names = if opts.solver.is_empty() { vec![SolverName::Polygen, SolverName::Eusolver] } else { opts.solver.clone() };
    let boxed: Vec<Box<dyn PbeSolver>> = names.into_iter().map(solver).collect();
    let solvers: Vec<&dyn PbeSolver> = boxed.iter().map(|b| b.as_ref()).collect();
    let seeds: Vec<u64> = (opts.seed..opts.seed.saturating_add(seeds)).collect();
    let m = run_matrix(&benches, &solvers, &model.models(), &seeds, &cfg, threads);
    println!("benchmark\tsolver\tmodel\tseed\tsuccess\texamples\tsize\ttime");
    for r in &m.runs {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
            r.benchmark,
            r.solver,
            r.model.name(),
            r.seed,
            r.success,
            r.examples_used,
            r.program_size,
            r.wall_time
        );
    }
    for a in &m.aggregates {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
        println!(
            "# {} vs {} ({}): {}/{} converged, {} pairs, examples x{}, time x{}, size x{}",
            a.solver,
            a.reference,
            a.model.name(),
            a.successes,
            a.runs,
            a.pairs,
            f(a.examples_ratio),
            f(a.time_ratio),
            f(a.size_ratio)
        );
    }
    write_outputs(&m, opts)?;
    Ok(m.runs.iter().all(|r| r.success))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve { task } => solve(task, &cli.opts),
        Command::Cegis { bench } => single_loop(bench, OracleModel::Cegis, &cli.opts),
        Command::Random { bench } => single_loop(bench, OracleModel::Random, &cli.opts),
        Command::Matrix { dir, seeds, model, threads } => matrix(dir, *seeds, *model, *threads, &cli.opts),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
