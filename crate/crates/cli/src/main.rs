//! Command-line solver: parses the instance, obtains a tree decomposition
//! (heuristically or from a file), runs the DP engine and prints the
//! solution on the last stdout line.
//!
//! Exit codes: 0 solved, 1 unsatisfiable (MaxSAT), 2 input error,
//! 3 row-capacity exceeded.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, ValueEnum};

use treedp::decomp::{read_td, TreeDecomposition};
use treedp::engine::{
    prepare_generated_td, prepare_user_td, run_dp, EngineConfig, EngineError, FreeVarMode,
    ProblemBundle, RunOutcome, SolutionKind, DEFAULT_ROW_CAP, MAX_DEFAULT_WORKERS,
};
use treedp::instance::{parse_dimacs_cnf, parse_dimacs_graph, parse_wdimacs};
use treedp::problems::{ColBundle, IdsBundle, MaxSatBundle, SharpSatBundle, VcBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Sharpsat,
    Col,
    Vc,
    Maxsat,
    Ids,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FreeVars {
    Count,
    Ignore,
}

/// Solve counting and optimization problems by dynamic programming over a
/// tree decomposition of the instance.
#[derive(Debug, Parser)]
#[command(name = "treedp", version, max_term_width = 100)]
struct Cli {
    /// Problem to solve.
    #[arg(long, value_enum)]
    problem: Problem,

    /// Instance file: DIMACS CNF (sharpsat), WDIMACS (maxsat), or a
    /// DIMACS/PACE graph (col, vc, ids).
    #[arg(long)]
    input: PathBuf,

    /// Number of colors (col only).
    #[arg(long)]
    colors: Option<u32>,

    /// Use this PACE-format tree decomposition instead of the heuristic.
    #[arg(long)]
    td: Option<PathBuf>,

    /// Seed for the decomposition heuristic's tie-breaking.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads for node-table computation.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,

    /// Cap on the fan-out of generated decompositions.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    child_limit: u64,

    /// Abort when a node table would exceed this many rows.
    #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
    row_cap: usize,

    /// How variables outside every clause count (sharpsat, col).
    #[arg(long, value_enum, default_value_t = FreeVars::Count)]
    free_vars: FreeVars,

    /// Keep and print all intermediate tables.
    #[arg(long)]
    debug: bool,

    /// Write a run-statistics record to this file.
    #[arg(long)]
    stats_json: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map_or(1, |p| p.get())
        .min(MAX_DEFAULT_WORKERS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    if cli.problem == Problem::Col && cli.colors.is_none() {
        anyhow::bail!("--colors is required for --problem col");
    }
    if cli.workers == 0 {
        anyhow::bail!("--workers must be at least 1");
    }
    let started = Instant::now();
    let text = std::fs::read_to_string(&cli.input)
        .with_context(|| format!("reading {}", cli.input.display()))?;

    match cli.problem {
        Problem::Sharpsat => {
            let parsed = parse_dimacs_cnf(&text)?;
            report_warnings(&parsed.warnings);
            solve(cli, SharpSatBundle::new(parsed.value), started)
        }
        Problem::Maxsat => {
            let parsed = parse_wdimacs(&text)?;
            report_warnings(&parsed.warnings);
            solve(cli, MaxSatBundle::new(parsed.value), started)
        }
        Problem::Col => {
            let parsed = parse_dimacs_graph(&text)?;
            report_warnings(&parsed.warnings);
            solve(
                cli,
                ColBundle::new(parsed.value, cli.colors.unwrap()),
                started,
            )
        }
        Problem::Vc => {
            let parsed = parse_dimacs_graph(&text)?;
            report_warnings(&parsed.warnings);
            solve(cli, VcBundle::new(parsed.value), started)
        }
        Problem::Ids => {
            let parsed = parse_dimacs_graph(&text)?;
            report_warnings(&parsed.warnings);
            solve(cli, IdsBundle::new(parsed.value), started)
        }
    }
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn obtain_td<B: ProblemBundle>(cli: &Cli, bundle: &B) -> anyhow::Result<TreeDecomposition> {
    match &cli.td {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let parsed = read_td(&text)?;
            report_warnings(&parsed.warnings);
            Ok(prepare_user_td(bundle, &parsed.value)
                .context("supplied tree decomposition rejected")?)
        }
        None => Ok(prepare_generated_td(
            bundle,
            cli.seed,
            cli.child_limit as usize,
        )),
    }
}

fn solve<B: ProblemBundle>(cli: &Cli, bundle: B, started: Instant) -> anyhow::Result<ExitCode> {
    let td = obtain_td(cli, &bundle)?;
    let config = EngineConfig {
        workers: cli.workers,
        row_cap: cli.row_cap,
        debug: cli.debug,
        free_vars: match cli.free_vars {
            FreeVars::Count => FreeVarMode::Count,
            FreeVars::Ignore => FreeVarMode::Ignore,
        },
    };

    let outcome = match run_dp(&bundle, &td, &config) {
        Ok(outcome) => outcome,
        Err(EngineError::Capacity { node, cap }) => {
            eprintln!("error: node {node} exceeds the row capacity of {cap} rows");
            return Ok(ExitCode::from(3));
        }
        Err(other) => return Err(other.into()),
    };
    let wall = started.elapsed();

    if let Some(trace) = &outcome.trace {
        for dump in trace {
            print!("{}", dump.render());
            println!();
        }
    }
    if let Some(path) = &cli.stats_json {
        std::fs::write(path, stats_json(cli, &bundle, &outcome, wall.as_secs_f64()))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    println!("{}", outcome.solution);
    Ok(match outcome.solution {
        SolutionKind::Unsat => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn stats_json<B: ProblemBundle>(
    cli: &Cli,
    bundle: &B,
    outcome: &RunOutcome,
    wall_seconds: f64,
) -> String {
    let solution = match &outcome.solution {
        SolutionKind::Count(c) => c.to_string(),
        SolutionKind::Optimum(o) => o.to_string(),
        SolutionKind::Unsat => "UNSAT".to_string(),
    };
    let mut out = String::from("{");
    let _ = write!(
        out,
        "\"problem\":{},",
        serde_json::to_string(bundle.name()).unwrap()
    );
    let _ = write!(out, "\"width\":{},", outcome.stats.width);
    let _ = write!(out, "\"nodeCount\":{},", outcome.stats.node_count);
    let _ = write!(out, "\"maxTableRows\":{},", outcome.stats.max_table_rows);
    let _ = write!(out, "\"wallSeconds\":{wall_seconds},");
    let _ = write!(out, "\"workers\":{},", cli.workers);
    let _ = write!(out, "\"seed\":{},", cli.seed);
    let _ = write!(
        out,
        "\"solution\":{}",
        serde_json::to_string(&solution).unwrap()
    );
    out.push('}');
    out
}
