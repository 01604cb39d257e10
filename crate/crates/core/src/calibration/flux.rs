use serde::{Deserialize, Serialize};

use crate::device::Device;
use crate::error::{Error, Result};
use crate::model::IsingModel;
use crate::seeds;
use crate::solvers::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxConfig {
    /// Shots per batch.
    pub batch: usize,
    pub max_iterations: usize,
    /// Fraction of the inferred field removed per iteration.
    pub damping: f64,
    pub sampler: SolverConfig,
    pub seed: u64,
}

impl Default for FluxConfig {
    fn default() -> Self {
        Self {
            batch: 1000,
            max_iterations: 30,
            damping: 1.0,
            sampler: SolverConfig { sweeps: 50, ..SolverConfig::default() },
            seed: 0,
        }
    }
}

/// Zeroes the average magnetisation of every spin under an all-zero model.
///
/// A spin with residual field `h` has `<s> = -tanh(β h)` at the sampler's
/// final inverse temperature, so each round adds `damping · atanh(<s>) / β`
/// to its offset. Stops once every `|<s>| < 3/√batch`. The returned offsets
/// are already applied to `device`.
pub fn flux_bias_calibrate(device: &mut Device, num_spins: usize, cfg: &FluxConfig) -> Result<Vec<f64>> {
    if cfg.batch == 0 || cfg.max_iterations == 0 || !(cfg.damping > 0.0) {
        return Err(Error::Config("flux calibration needs positive batch, iterations and damping".into()));
    }
    let zero = IsingModel::<f64>::new(num_spins);
    let band = 3.0 / (cfg.batch as f64).sqrt();
    let clamp = 1.0 - 1.0 / cfg.batch as f64;
    let beta = cfg.sampler.beta_final;
    let mut offsets = vec![0.0; num_spins];
    let mut trace = Vec::new();
    for it in 0..cfg.max_iterations {
        device.rest();
        let sampler = SolverConfig {
            num_samples: cfg.batch,
            seed: seeds::derive_seed(cfg.seed, "flux", it as u64),
            ..cfg.sampler.clone()
        };
        let samples = device.sample(&zero, &sampler)?;
        let shots = samples.total_count() as f64;
        let mut mags = vec![0.0; num_spins];
        for s in samples.iter() {
            for (m, &v) in mags.iter_mut().zip(&s.state) {
                *m += v as f64 * s.count as f64 / shots;
            }
        }
        let worst = mags.iter().fold(0.0f64, |a, m| a.max(m.abs()));
        trace.push(worst);
        if worst < band {
            return Ok(offsets);
        }
        let step: Vec<f64> = mags.iter().map(|m| cfg.damping * m.clamp(-clamp, clamp).atanh() / beta).collect();
        device.apply_flux_offsets(&step);
        for (o, d) in offsets.iter_mut().zip(&step) {
            *o += d;
        }
    }
    Err(Error::calibration(
        format!("magnetisation stayed above {band:.4} after {} iterations", cfg.max_iterations),
        trace,
    ))
}
