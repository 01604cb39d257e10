//! Problem-aware calibration of the simulated annealer: flux-bias zeroing,
//! Monte Carlo cover references, iterative pairwise corrections and
//! per-vertex value scaling from sigmoid fits.

mod flux;
mod mc;
mod pairwise;
mod scale;
mod sigmoid;
mod stats;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use flux::{flux_bias_calibrate, FluxConfig};
pub use mc::{mc_cover_sample, CoverWeighting, McEstimate, McOptions};
pub use pairwise::{
    calibrate_pairwise, correction_step, cover_qubo, cover_reference, estimate_sigma, PairCorrections, PairwiseConfig,
    PairwiseResult, STOP_FACTOR,
};
pub use scale::{inclusion_curve, offset_scale_calibrate, scaled_values, ScaleConfig, ScaleDirection, VertexScale};
pub use sigmoid::{fit_sigmoid, sigmoid, SigmoidFit};
pub use stats::{all_pairs, cell, pairwise_stats, PairStatistics};

use crate::device::Device;
use crate::error::{Error, Result};

/// Everything learned about a device for one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationState {
    pub num_spins: usize,
    pub flux_offsets: Vec<f64>,
    pub corrections: PairCorrections,
    pub sigma: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    /// Sigmoid fit per calibrated vertex.
    pub vertex_fits: BTreeMap<usize, SigmoidFit>,
}

impl CalibrationState {
    pub fn from_parts(flux_offsets: Vec<f64>, pairwise: PairwiseResult) -> Self {
        Self {
            num_spins: flux_offsets.len(),
            flux_offsets,
            corrections: pairwise.corrections,
            sigma: pairwise.sigma,
            epsilon: pairwise.epsilon,
            iterations: pairwise.iterations,
            trace: pairwise.trace,
            vertex_fits: BTreeMap::new(),
        }
    }

    /// Width `w_i` per vertex, `None` where no fit exists.
    pub fn widths(&self) -> Vec<Option<f64>> {
        (0..self.num_spins).map(|i| self.vertex_fits.get(&i).map(|f| f.w)).collect()
    }

    /// Loads offsets and corrections onto a fresh device.
    pub fn apply(&self, device: &mut Device) {
        device.clear_calibration();
        device.apply_flux_offsets(&self.flux_offsets);
        device.apply_corrections(&self.corrections.to_qubo(self.num_spins));
    }

    pub fn validate(&self) -> Result<()> {
        if self.flux_offsets.len() != self.num_spins {
            return Err(Error::Config("flux offsets do not match the spin count".into()));
        }
        if self.corrections.pairs.len() != self.corrections.coeffs.len()
            || self.corrections.pairs.iter().any(|&(i, j)| i >= j || j >= self.num_spins)
        {
            return Err(Error::Config("malformed pair corrections".into()));
        }
        Ok(())
    }
}
