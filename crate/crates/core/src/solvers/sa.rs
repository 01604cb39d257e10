use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SampleSet;
use crate::error::{Error, Result};
use crate::model::{qubo_to_ising, spins_to_bits, IsingModel, QuboModel};
use crate::scalar::Scalar;
use crate::seeds;

/// Settings of the simulated-annealing sampler. `sweeps` stands in for the
/// anneal time of the hardware.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub num_samples: usize,
    pub sweeps: usize,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool, 1 runs inline. Output does not
    /// depend on this value.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { num_samples: 1000, sweeps: 200, beta_initial: 0.1, beta_final: 10.0, seed: 0, threads: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps < 1 {
            return Err(Error::argument("sweeps must be at least 1"));
        }
        if !(self.beta_initial > 0.0 && self.beta_final >= self.beta_initial && self.beta_final.is_finite()) {
            return Err(Error::argument(format!(
                "beta schedule needs 0 < beta_initial <= beta_final, got {} and {}",
                self.beta_initial, self.beta_final
            )));
        }
        Ok(())
    }

    /// Geometric inverse-temperature schedule, one entry per sweep.
    pub fn beta_schedule(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_final];
        }
        let ratio = (self.beta_final / self.beta_initial).powf(1.0 / (self.sweeps - 1) as f64);
        (0..self.sweeps).map(|k| self.beta_initial * ratio.powi(k as i32)).collect()
    }
}

/// Sparse `f64` copy of an Ising model used inside the Metropolis loop.
#[derive(Debug, Clone)]
pub(crate) struct SpinSystem {
    pub h: Vec<f64>,
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl SpinSystem {
    pub fn from_ising<T: Scalar>(model: &IsingModel<T>) -> Self {
        let h = model.linear().iter().map(|c| c.to_f64_lossy()).collect();
        let adj = model
            .adjacency()
            .into_iter()
            .map(|row| row.into_iter().map(|(j, c)| (j, c.to_f64_lossy())).collect())
            .collect();
        Self { h, adj }
    }

    fn anneal<R: Rng>(&self, betas: &[f64], rng: &mut R) -> Vec<i8> {
        let n = self.h.len();
        let mut s: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        if n == 0 {
            return s;
        }
        let mut field: Vec<f64> =
            (0..n).map(|i| self.h[i] + self.adj[i].iter().map(|&(j, c)| c * s[j] as f64).sum::<f64>()).collect();
        for &beta in betas {
            for _ in 0..n {
                let i = rng.random_range(0..n);
                let delta = -2.0 * s[i] as f64 * field[i];
                if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                    s[i] = -s[i];
                    let step = 2.0 * s[i] as f64;
                    for &(j, c) in &self.adj[i] {
                        field[j] += c * step;
                    }
                }
            }
        }
        s
    }

    /// Runs `cfg.num_samples` independent anneals. Sample `k` draws from the
    /// sub-stream `(cfg.seed, stream, batch)` / `k`, so results do not depend
    /// on thread count.
    pub fn sample(&self, cfg: &SolverConfig, stream: &str, batch: u64) -> Vec<Vec<i8>> {
        let betas = cfg.beta_schedule();
        let root = seeds::derive_seed(cfg.seed, stream, batch);
        let one = |k: usize| self.anneal(&betas, &mut seeds::rng(root, "anneal", k as u64));
        match cfg.threads {
            1 => (0..cfg.num_samples).map(one).collect(),
            0 => (0..cfg.num_samples).into_par_iter().map(one).collect(),
            t => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map(|pool| pool.install(|| (0..cfg.num_samples).into_par_iter().map(one).collect()))
                .unwrap_or_else(|_| (0..cfg.num_samples).map(one).collect()),
        }
    }
}

/// Metropolis simulated annealing with random-site updates, `n` proposals per sweep.
/// Energies in the returned set are evaluated on `model` itself.
pub fn sa_sample<T: Scalar>(model: &IsingModel<T>, cfg: &SolverConfig) -> Result<SampleSet<T>> {
    cfg.validate()?;
    let states = SpinSystem::from_ising(model).sample(cfg, "sa", 0);
    Ok(SampleSet::from_states(model, states))
}

/// Samples a QUBO through its Ising form and reports binary states.
pub fn sa_sample_qubo<T: Scalar>(model: &QuboModel<T>, cfg: &SolverConfig) -> Result<SampleSet<T>> {
    let ising = qubo_to_ising(model);
    let spins = sa_sample(&ising, cfg)?;
    Ok(SampleSet::from_states(model, spins.expanded_states().map(spins_to_bits)))
}
