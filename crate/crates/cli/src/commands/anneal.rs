//! `qubo`, `solve` and `sweep-anneal`.

use std::path::PathBuf;
use std::str::FromStr;

use annealsched::calibration::{scaled_values, ScaleDirection};
use annealsched::demand::DemandModel;
use annealsched::device::create_device;
use annealsched::model::io::{read_model, write_model, ModelFile};
use annealsched::model::{
    eliminate_linear_terms, mvvc_qubo, qubo_to_ising, redistribute_values, split_aux_spin, EdgeWeights, MvvcProblem,
    QuboModel, XorIsing,
};
use annealsched::schedule::stream_instance;
use annealsched::seeds;
use annealsched::solvers::{
    exact_solve, postprocess, quantile_energy, sa_sample, sa_sample_qubo, SampleSet, SolverConfig,
};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use super::scheduling::mean_stderr;
use super::Context;
use crate::config::DeviceSpec;
use crate::error::{CliError, CliResult};
use crate::io;

/// How far along the reformulation chain to go.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Plain value-plus-penalty QUBO.
    Mvvc,
    /// Values moved onto the edges with `w_ij = 1/O_i`.
    Redistribute,
    /// Ising form of the redistributed QUBO.
    Ising,
    /// Linear terms absorbed by one auxiliary spin.
    Xor,
    /// Auxiliary spin split into `M` coupled copies.
    Split(usize),
}

impl FromStr for Transform {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "mvvc" => Transform::Mvvc,
            "redistribute" => Transform::Redistribute,
            "ising" => Transform::Ising,
            "xor" => Transform::Xor,
            _ => match s.strip_prefix("split:").map(str::parse::<usize>) {
                Some(Ok(m)) if m >= 1 => Transform::Split(m),
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown transform `{s}` (expected mvvc, redistribute, ising, xor or split:<M>)"
                    )))
                }
            },
        })
    }
}

pub fn build_model(problem: &MvvcProblem<f64>, transform: Transform, penalty: f64) -> CliResult<ModelFile<f64>> {
    let plain = mvvc_qubo(problem, penalty);
    if transform == Transform::Mvvc {
        return Ok(ModelFile::Qubo(plain));
    }
    let redistributed = redistribute_values(&plain, &problem.graph, &EdgeWeights::inverse_degree(&problem.graph))?;
    let ising = qubo_to_ising(&redistributed);
    Ok(match transform {
        Transform::Mvvc => unreachable!(),
        Transform::Redistribute => ModelFile::Qubo(redistributed),
        Transform::Ising => ModelFile::Ising(XorIsing { model: ising, aux: Vec::new() }),
        Transform::Xor => ModelFile::Ising(eliminate_linear_terms(&ising)),
        Transform::Split(m) => ModelFile::Ising(split_aux_spin(&eliminate_linear_terms(&ising), m)?),
    })
}

#[derive(Debug, Args)]
pub struct QuboArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// mvvc, redistribute, ising, xor or split:<M>.
    #[arg(long, default_value = "mvvc")]
    pub transform: String,
    /// Edge penalty of the independence constraint.
    #[arg(long, default_value_t = 1.0)]
    pub penalty: f64,
    /// Scale the values by the fitted widths stored in this calibration.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub direction: Option<Direction>,
    #[arg(long, default_value = "model.txt")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Multiply,
    Divide,
}

pub fn qubo(ctx: &Context, args: &QuboArgs) -> CliResult<()> {
    let transform: Transform = args.transform.parse()?;
    if !(args.penalty > 0.0) {
        return Err(CliError::Usage("--penalty must be positive".into()));
    }
    let mut problem = io::read_graph(&args.graph)?.problem()?;
    if let Some(path) = &args.calibration {
        let state = io::read_calibration(path)?;
        if state.num_spins != problem.graph.num_vertices() {
            return Err(CliError::Config(format!("{} was made for another graph", path.display())));
        }
        let direction = match args.direction {
            Some(Direction::Multiply) => ScaleDirection::Multiply,
            Some(Direction::Divide) => ScaleDirection::Divide,
            None => ctx.cfg.calibration.direction,
        };
        let values = scaled_values(&problem.values, &state.widths(), direction)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        problem = MvvcProblem::new(problem.graph, values)?;
    }
    let model = build_model(&problem, transform, args.penalty)?;
    let out = ctx.output(&args.out);
    io::write_text(&out, &write_model(&model))?;
    println!("wrote {} model with {} variables to {}", args.transform, model.num_vars(), out.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Exact,
    Sa,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "sa")]
    pub solver: SolverKind,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// ideal or noisy:<seed>; overrides the config device.
    #[arg(long)]
    pub device: Option<DeviceSpec>,
    /// Calibration to load onto the device before sampling.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// Refine every sample by steepest descent.
    #[arg(long)]
    pub postprocess: bool,
    #[arg(long, default_value = "samples.csv")]
    pub out: PathBuf,
}

pub fn solve(ctx: &Context, args: &SolveArgs) -> CliResult<()> {
    let model: ModelFile<f64> =
        read_model(&io::read_text(&args.model)?).map_err(|e| CliError::input(&args.model, e))?;
    let samples = match args.solver {
        SolverKind::Exact => {
            if args.device.is_some() || args.calibration.is_some() {
                return Err(CliError::Usage("--device and --calibration apply to the sa solver only".into()));
            }
            match &model {
                ModelFile::Qubo(q) => SampleSet::from_states(q, exact_solve(q)?.states),
                ModelFile::Ising(s) => SampleSet::from_states(&s.model, exact_solve(&s.model)?.states),
            }
        }
        SolverKind::Sa => sample_sa(ctx, args, &model)?,
    };
    let samples = if args.postprocess {
        match &model {
            ModelFile::Qubo(q) => postprocess(q, &samples),
            ModelFile::Ising(s) => postprocess(&s.model, &samples),
        }
    } else {
        samples
    };
    let out = ctx.output(&args.out);
    io::write_csv(&out, io::sample_rows(&samples))?;
    let best = samples.lowest().map(|s| s.energy).unwrap_or(f64::NAN);
    println!(
        "{} samples, {} distinct, lowest energy {best}; wrote {}",
        samples.total_count(),
        samples.samples().len(),
        out.display()
    );
    Ok(())
}

fn sample_sa(ctx: &Context, args: &SolveArgs, model: &ModelFile<f64>) -> CliResult<SampleSet<f64>> {
    let mut cfg = SolverConfig { seed: ctx.seed("solve"), ..ctx.cfg.solver.clone() };
    if let Some(n) = args.samples {
        cfg.num_samples = n;
    }
    if let Some(k) = args.sweeps {
        cfg.sweeps = k;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut device_cfg = ctx.cfg.device.clone();
    if let Some(spec) = args.device {
        device_cfg.spec = spec;
    }
    if device_cfg.spec == DeviceSpec::Ideal && args.calibration.is_none() {
        return Ok(match model {
            ModelFile::Qubo(q) => sa_sample_qubo(q, &cfg)?,
            ModelFile::Ising(s) => sa_sample(&s.model, &cfg)?,
        });
    }
    let mut device = create_device(device_cfg.noise_model())?;
    if let Some(path) = &args.calibration {
        let state = io::read_calibration(path)?;
        if state.num_spins != model.num_vars() {
            return Err(CliError::Config(format!(
                "{} covers {} spins but the model has {}",
                path.display(),
                state.num_spins,
                model.num_vars()
            )));
        }
        state.apply(&mut device);
    }
    Ok(match model {
        ModelFile::Qubo(q) => device.sample_qubo(q, &cfg)?,
        ModelFile::Ising(s) => device.sample(&s.model, &cfg)?,
    })
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated campus scales; defaults to the config grid.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub sweeps: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub sample_sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub scale: u32,
    pub sweeps: usize,
    pub sample_size: usize,
    pub quantile: f64,
    /// `raw` or `descent`.
    pub variant: String,
    /// Mean quantile energy divided by the scale.
    pub mean_energy_per_scale: f64,
    pub stderr: f64,
    pub realizations: usize,
}

struct Point {
    scale: u32,
    sweeps: usize,
    sample_size: usize,
    /// `[variant][quantile]` energies of one realization.
    quantiles: [Vec<f64>; 2],
}

pub fn sweep_anneal(ctx: &Context, args: &SweepArgs) -> CliResult<()> {
    let grid = &ctx.cfg.sweep;
    let scales = args.scales.clone().unwrap_or_else(|| grid.scales.clone());
    let sweeps = args.sweeps.clone().unwrap_or_else(|| grid.sweeps.clone());
    let sizes = args.sample_sizes.clone().unwrap_or_else(|| grid.sample_sizes.clone());
    let realizations = args.realizations.unwrap_or(grid.realizations);
    let quantiles = grid.quantiles.clone();
    if scales.is_empty() || sweeps.is_empty() || sizes.is_empty() || quantiles.is_empty() || realizations == 0 {
        return Err(CliError::Usage("sweep grid is empty".into()));
    }
    if scales.contains(&0) || sweeps.contains(&0) || sizes.contains(&0) {
        return Err(CliError::Usage("scales, sweeps and sample sizes must be positive".into()));
    }
    if quantiles.iter().any(|&q| !(q > 0.0 && q <= 1.0)) {
        return Err(CliError::Config("quantiles must lie in (0, 1]".into()));
    }

    let instances: Vec<(u32, usize, QuboModel<f64>)> = scales
        .iter()
        .flat_map(|&s| (0..realizations).map(move |r| (s, r)))
        .map(|(s, r)| {
            let seed = seeds::derive_seed(ctx.cfg.seed, "realization", r as u64);
            let (_, problem) = stream_instance(&DemandModel::for_scale(s), &ctx.cfg.harness, seed)?;
            let model = match build_model(&problem, Transform::Redistribute, 1.0)? {
                ModelFile::Qubo(q) => q,
                ModelFile::Ising(_) => unreachable!(),
            };
            Ok((s, r, model))
        })
        .collect::<CliResult<_>>()?;

    let mut tasks = Vec::new();
    for i in 0..instances.len() {
        for &k in &sweeps {
            for &m in &sizes {
                tasks.push((i, k, m));
            }
        }
    }
    let points: Vec<Point> = tasks
        .par_iter()
        .map(|&(i, k, m)| {
            let (s, r, model) = &instances[i];
            let cfg = SolverConfig {
                num_samples: m,
                sweeps: k,
                seed: seeds::derive_seed(ctx.seed("sweep"), &format!("s{s}-k{k}-m{m}"), *r as u64),
                ..ctx.cfg.solver.clone()
            };
            let raw = sa_sample_qubo(model, &cfg)?;
            let refined = postprocess(model, &raw);
            let q = |set: &SampleSet<f64>| {
                quantiles.iter().map(|&q| quantile_energy(set, q)).collect::<Result<Vec<_>, _>>()
            };
            Ok(Point { scale: *s, sweeps: k, sample_size: m, quantiles: [q(&raw)?, q(&refined)?] })
        })
        .collect::<CliResult<_>>()?;

    let mut rows = Vec::new();
    for &s in &scales {
        for &k in &sweeps {
            for &m in &sizes {
                let group: Vec<&Point> =
                    points.iter().filter(|p| p.scale == s && p.sweeps == k && p.sample_size == m).collect();
                for (v, variant) in ["raw", "descent"].into_iter().enumerate() {
                    for (qi, &q) in quantiles.iter().enumerate() {
                        let xs: Vec<f64> = group.iter().map(|p| p.quantiles[v][qi] / s as f64).collect();
                        let (mean, stderr) = mean_stderr(&xs);
                        rows.push(SweepRow {
                            scale: s,
                            sweeps: k,
                            sample_size: m,
                            quantile: q,
                            variant: variant.to_string(),
                            mean_energy_per_scale: mean,
                            stderr,
                            realizations: xs.len(),
                        });
                    }
                }
            }
        }
    }
    let out = ctx.output(&args.out);
    io::write_csv(&out, &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}
