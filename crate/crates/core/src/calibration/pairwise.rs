use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::mc::{mc_cover_sample, CoverWeighting, McOptions};
use super::stats::{pairwise_stats, PairStatistics};
use crate::device::Device;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{mvvc_qubo, MvvcProblem, QuboModel};
use crate::seeds;
use crate::solvers::SolverConfig;

/// Accumulated corrections per pair on the binomials
/// `(1-x_i)(1-x_j)`, `(1-x_i) x_j` and `x_i (1-x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCorrections {
    pub pairs: Vec<(usize, usize)>,
    pub coeffs: Vec<[f64; 3]>,
}

impl PairCorrections {
    pub fn zero(pairs: &[(usize, usize)]) -> Self {
        Self { pairs: pairs.to_vec(), coeffs: vec![[0.0; 3]; pairs.len()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0.0)
    }

    pub fn add(&mut self, other: &PairCorrections) -> Result<()> {
        if self.pairs != other.pairs {
            return Err(Error::argument("corrections cover different pairs"));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        Ok(())
    }

    /// Expands the binomials into QUBO coefficients over `num_vars` variables.
    pub fn to_qubo(&self, num_vars: usize) -> QuboModel<f64> {
        let n = self.pairs.iter().map(|&(_, j)| j + 1).max().unwrap_or(0).max(num_vars);
        let mut q = QuboModel::new(n);
        for (&(i, j), &[c00, c01, c10]) in self.pairs.iter().zip(&self.coeffs) {
            q.add_offset(c00);
            q.add_linear(i, c10 - c00);
            q.add_linear(j, c01 - c00);
            q.add_quadratic(i, j, c00 - c01 - c10);
        }
        q.prune();
        q
    }
}

/// Pooled standard deviation of every pair cell across replicate batches.
/// Identical replicates give zero spread, which is floored at `1/√shots`.
pub fn estimate_sigma(replicates: &[PairStatistics], shots: usize) -> Result<f64> {
    if replicates.len() < 2 {
        return Err(Error::argument("sigma needs at least two replicate batches"));
    }
    let mean = PairStatistics::average(replicates)?;
    let r = replicates.len() as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for (k, m) in mean.probs.iter().enumerate() {
        for c in 0..4 {
            total += replicates.iter().map(|s| (s.probs[k][c] - m[c]).powi(2)).sum::<f64>() / (r - 1.0);
            count += 1;
        }
    }
    let sigma = if count == 0 { 0.0 } else { (total / count as f64).sqrt() };
    Ok(if sigma > 0.0 { sigma } else { 1.0 / (shots.max(1) as f64).sqrt() })
}

/// One correction: `ε Δ erf(|Δ|/σ)` on each of the three binomials, with
/// `Δ = Q - P`. Cells with `x_i = x_j = 1` get no direct term.
pub fn correction_step(p: &PairStatistics, q: &PairStatistics, sigma: f64, epsilon: f64) -> Result<PairCorrections> {
    if !(sigma > 0.0 && epsilon > 0.0) {
        return Err(Error::argument("sigma and epsilon must be positive"));
    }
    let delta = q.difference(p)?;
    let term = |d: f64| epsilon * d * erf(d.abs() / sigma);
    Ok(PairCorrections {
        pairs: p.pairs.clone(),
        coeffs: delta.iter().map(|d| [term(d[0]), term(d[1]), term(d[2])]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairwiseConfig {
    /// Shots per batch.
    pub shots: usize,
    /// Batches drawn before any correction to estimate σ.
    pub sigma_replicates: usize,
    pub epsilon0: f64,
    pub decay: f64,
    pub max_iterations: usize,
    /// Consecutive increases of mean |Δ| treated as divergence.
    pub divergence_window: usize,
    /// Stop once mean |Δ| < stop_factor · σ.
    pub stop_factor: f64,
    pub trajectories: usize,
    /// Edge penalty of the zero-value cover problem.
    pub edge_penalty: f64,
    pub sampler: SolverConfig,
    pub seed: u64,
}

/// `E|x - y|` for independent zero-mean Gaussians of unit std.
pub const STOP_FACTOR: f64 = std::f64::consts::FRAC_2_SQRT_PI;

impl Default for PairwiseConfig {
    fn default() -> Self {
        Self {
            shots: 1000,
            sigma_replicates: 4,
            epsilon0: 1.0,
            decay: 0.8,
            max_iterations: 50,
            divergence_window: 4,
            stop_factor: STOP_FACTOR,
            trajectories: 100_000,
            edge_penalty: 1.0,
            sampler: SolverConfig { sweeps: 100, ..SolverConfig::default() },
            seed: 0,
        }
    }
}

impl PairwiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.sigma_replicates < 2 || self.max_iterations == 0 || self.trajectories == 0 {
            return Err(Error::Config("shots, iterations and trajectories must be positive; replicates >= 2".into()));
        }
        if !(self.epsilon0 > 0.0 && self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Config("need epsilon0 > 0 and decay in (0, 1]".into()));
        }
        if !(self.stop_factor > 0.0 && self.edge_penalty > 0.0) {
            return Err(Error::Config("stop factor and edge penalty must be positive".into()));
        }
        self.sampler.validate().map_err(|e| Error::Config(e.to_string()))
    }

    fn sampler(&self, iteration: u64) -> SolverConfig {
        SolverConfig {
            num_samples: self.shots,
            seed: seeds::derive_seed(self.seed, "pairwise-sampler", iteration),
            ..self.sampler.clone()
        }
    }
}

/// Outcome of [`calibrate_pairwise`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub corrections: PairCorrections,
    pub sigma: f64,
    /// Step scale of the last applied correction.
    pub epsilon: f64,
    pub iterations: usize,
    /// Mean |Δ| measured at each iteration.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Zero-value cover problem: only the edge penalties.
pub fn cover_qubo(graph: &Graph, edge_penalty: f64) -> Result<QuboModel<f64>> {
    Ok(mvvc_qubo(&MvvcProblem::new(graph.clone(), vec![0.0; graph.num_vertices()])?, edge_penalty))
}

/// Reference statistics: uniform over independent sets including the empty
/// one, which is as likely as any other cover at zero value.
pub fn cover_reference(graph: &Graph, trajectories: usize, seed: u64) -> Result<PairStatistics> {
    let opts = McOptions {
        weighting: CoverWeighting::DivideOrderings,
        include_empty: true,
        pairs: Some(graph.edges().to_vec()),
    };
    Ok(mc_cover_sample(graph, trajectories, &opts, &mut seeds::rng(seed, "pairwise-reference", 0))?.stats)
}

fn measure(
    device: &mut Device,
    qubo: &QuboModel<f64>,
    cfg: &PairwiseConfig,
    batch: u64,
    pairs: &[(usize, usize)],
) -> Result<PairStatistics> {
    device.rest();
    let samples = device.sample_qubo(qubo, &cfg.sampler(batch))?;
    pairwise_stats(&samples, pairs)
}

/// Iterative pairwise calibration on the edges of `graph`.
///
/// Each iteration samples the zero-value cover problem, compares pair
/// statistics with the Monte Carlo reference and applies
/// `ε_t = ε_0 · decay^t` scaled corrections to the device. Corrections depend
/// only on the graph, so they carry over to any values placed on it later.
pub fn calibrate_pairwise(device: &mut Device, graph: &Graph, cfg: &PairwiseConfig) -> Result<PairwiseResult> {
    cfg.validate()?;
    if graph.num_edges() == 0 {
        return Err(Error::argument("pairwise calibration needs at least one edge"));
    }
    let pairs = graph.edges().to_vec();
    let qubo = cover_qubo(graph, cfg.edge_penalty)?;
    let reference = cover_reference(graph, cfg.trajectories, cfg.seed)?;
    let mut batch = 0u64;
    let mut replicates = Vec::with_capacity(cfg.sigma_replicates);
    for _ in 0..cfg.sigma_replicates {
        replicates.push(measure(device, &qubo, cfg, batch, &pairs)?);
        batch += 1;
    }
    let sigma = estimate_sigma(&replicates, cfg.shots)?;
    let threshold = cfg.stop_factor * sigma;

    let mut corrections = PairCorrections::zero(&pairs);
    let mut trace = Vec::new();
    let mut epsilon = cfg.epsilon0;
    for t in 0..cfg.max_iterations {
        let q = if t == 0 { replicates[0].clone() } else { measure(device, &qubo, cfg, batch, &pairs)? };
        batch += 1;
        let mean_delta = q.mean_abs_difference(&reference)?;
        trace.push(mean_delta);
        if mean_delta < threshold {
            return Ok(PairwiseResult { corrections, sigma, epsilon, iterations: t + 1, trace, converged: true });
        }
        let w = cfg.divergence_window;
        if w > 0 && trace.len() > w && trace[trace.len() - w - 1..].windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::calibration(format!("mean |delta| grew for {w} consecutive iterations"), trace));
        }
        epsilon = cfg.epsilon0 * cfg.decay.powi(t as i32);
        let step = correction_step(&reference, &q, sigma, epsilon)?;
        device.apply_corrections(&step.to_qubo(graph.num_vertices()));
        corrections.add(&step)?;
    }
    Err(Error::calibration(
        format!("mean |delta| stayed above {threshold:.4} after {} iterations", cfg.max_iterations),
        trace,
    ))
}
