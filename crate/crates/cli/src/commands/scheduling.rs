//! `gen-stream`, `schedule` and `compare`.

use std::path::PathBuf;

use annealsched::demand::generate_stream;
use annealsched::model::{random_values, MvvcProblem};
use annealsched::schedule::{build_collision_graph, run_failure_harness, Method, OccupancyState, Scheduler};
use annealsched::seeds;
use annealsched::solvers::{AnnealedMvvc, ExactMvvc, MvvcSolver};
use clap::{Args, ValueEnum};
use serde::Serialize;

use super::Context;
use crate::error::{CliError, CliResult};
use crate::io::{self, CurveRow, GraphFile, StreamRow};

#[derive(Debug, Args)]
pub struct GenStreamArgs {
    /// Days of arrivals; defaults to warm-up plus test period.
    #[arg(long)]
    pub days: Option<u32>,
    #[arg(long, default_value = "stream.csv")]
    pub out: PathBuf,
    /// Also write the overlap graph of the test-period requests with values.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

pub fn gen_stream(ctx: &Context, args: &GenStreamArgs) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let demand = cfg.demand();
    let days = args.days.unwrap_or(cfg.harness.warmup_days + cfg.harness.test_days);
    if days == 0 {
        return Err(CliError::Usage("--days must be positive".into()));
    }
    let stream = generate_stream(&demand, days, &mut seeds::rng(cfg.seed, "stream", 0))?;
    let out = ctx.output(&args.out);
    io::write_csv(&out, stream.iter().map(StreamRow::from))?;
    println!("wrote {} requests to {}", stream.len(), out.display());

    if let Some(graph_out) = &args.graph_out {
        let from = if days > cfg.harness.warmup_days { cfg.harness.warmup_days } else { 0 };
        let requests: Vec<_> = stream.iter().filter(|r| r.start_day >= from).copied().collect();
        let graph = build_collision_graph(&requests).graph;
        let durations: Vec<u32> = requests.iter().map(|r| r.duration).collect();
        let values = random_values(&graph, demand.max_duration(), &durations, &mut seeds::rng(cfg.seed, "values", 0))?;
        let problem = MvvcProblem::new(graph, values)?;
        let path = ctx.output(graph_out);
        io::write_json(&path, &GraphFile::from_problem(&problem, requests.iter().map(|r| r.id).collect()))?;
        println!(
            "wrote graph with {} vertices and {} edges to {}",
            problem.graph.num_vertices(),
            problem.graph.num_edges(),
            path.display()
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MvvcBackend {
    Exact,
    Anneal,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub stream: PathBuf,
    #[arg(long, default_value = "greedy")]
    pub method: String,
    /// Solver for the per-room MVVC subproblems of the hybrid methods.
    #[arg(long, value_enum, default_value = "exact")]
    pub mvvc: MvvcBackend,
    #[arg(long, default_value = "schedule.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ScheduleRow {
    request_id: usize,
    status: &'static str,
    /// Room ids joined by `;`.
    rooms: String,
}

pub fn schedule(ctx: &Context, args: &ScheduleArgs) -> CliResult<()> {
    let method: Method = args.method.parse()?;
    let requests = io::read_stream(&args.stream)?;
    let campus = ctx.cfg.campus()?;
    let horizon = requests.iter().map(|r| r.end_day()).max().unwrap_or(0).max(1);
    let mut state = OccupancyState::new(campus.rooms.clone(), horizon)?;
    let exact = ExactMvvc::default();
    let annealed = AnnealedMvvc {
        config: annealsched::solvers::SolverConfig { seed: ctx.seed("mvvc"), ..ctx.cfg.solver.clone() },
    };
    let mvvc: &dyn MvvcSolver = match args.mvvc {
        MvvcBackend::Exact => &exact,
        MvvcBackend::Anneal => &annealed,
    };
    let scheduler =
        Scheduler { method, values: ctx.cfg.harness.values, mvvc, exact_max_states: ctx.cfg.harness.exact_max_states };
    let rejected = scheduler.batch(&mut state, &requests)?;
    state.verify()?;
    let rows: Vec<ScheduleRow> = requests
        .iter()
        .map(|r| match state.assignment(r.id) {
            Some(a) => ScheduleRow {
                request_id: r.id,
                status: "accepted",
                rooms: a.rooms.iter().map(|&i| state.rooms()[i].id.to_string()).collect::<Vec<_>>().join(";"),
            },
            None => ScheduleRow { request_id: r.id, status: "rejected", rooms: String::new() },
        })
        .collect();
    let out = ctx.output(&args.out);
    io::write_csv(&out, rows)?;
    println!(
        "{}: accepted {} of {} requests, filling factor {:.4}; wrote {}",
        method.name(),
        requests.len() - rejected.len(),
        requests.len(),
        state.filling_factor(),
        out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated methods; defaults to the config list.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Stream seeds as a list (`1,2,3`) or a half-open range (`0..50`).
    #[arg(long)]
    pub seeds: Option<String>,
    /// Output directory for the curve files, under the output root.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn parse_seeds(text: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::Usage(format!("bad seed list `{text}`"));
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    method: &'static str,
    streams: usize,
    streams_with_rejection: usize,
    first_rejection_mean: f64,
    first_rejection_stderr: f64,
    final_filling_mean: f64,
}

pub fn compare(ctx: &Context, args: &CompareArgs) -> CliResult<()> {
    let methods: Vec<Method> = match &args.methods {
        Some(names) => names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?,
        None => ctx.cfg.methods.clone(),
    };
    if methods.is_empty() {
        return Err(CliError::Usage("no methods to compare".into()));
    }
    let seeds = match &args.seeds {
        Some(text) => parse_seeds(text)?,
        None => ctx.cfg.seeds.clone(),
    };
    if seeds.is_empty() {
        return Err(CliError::Usage("seed list is empty".into()));
    }
    let campus = ctx.cfg.campus()?;
    let demand = ctx.cfg.demand();
    let dir = ctx.output(&args.out);
    let mut summary = Vec::new();
    for method in methods {
        let (traces, curve) = run_failure_harness(method, &seeds, &campus, &demand, &ctx.cfg.harness)?;
        let path = dir.join(format!("curve_{}.csv", method.name()));
        io::write_csv(&path, curve.iter().map(CurveRow::from))?;
        let first: Vec<f64> = traces.iter().filter_map(|t| t.failures.first().copied()).collect();
        let (mean, stderr) = mean_stderr(&first);
        summary.push(SummaryRow {
            method: method.name(),
            streams: traces.len(),
            streams_with_rejection: first.len(),
            first_rejection_mean: mean,
            first_rejection_stderr: stderr,
            final_filling_mean: traces.iter().map(|t| t.final_filling).sum::<f64>() / traces.len() as f64,
        });
        println!(
            "{:<8} first rejection at filling {:.4} +- {:.4} ({} of {} streams); wrote {}",
            method.name(),
            mean,
            stderr,
            first.len(),
            traces.len(),
            path.display()
        );
    }
    io::write_csv(&dir.join("summary.csv"), summary)?;
    Ok(())
}

/// Mean and standard error; zero spread for fewer than two values.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4, 9").unwrap(), vec![4, 9]);
        assert!(parse_seeds("").unwrap().is_empty());
        assert!(parse_seeds("3..1").unwrap().is_empty());
        assert!(parse_seeds("a,b").is_err());
    }

    #[test]
    fn stderr_of_pairs() {
        let (m, s) = mean_stderr(&[0.2, 0.4]);
        assert!((m - 0.3).abs() < 1e-12 && (s - 0.1).abs() < 1e-12);
        assert_eq!(mean_stderr(&[0.5]), (0.5, 0.0));
    }
}
