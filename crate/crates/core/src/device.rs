//! Simulated imperfect annealer.
//!
//! A [`Device`] samples submitted Ising models through the simulated-annealing
//! sampler after adding hidden per-spin and per-coupler biases, per-spin gain
//! errors on the submitted fields, a transient field left over from the last
//! batch, and independent readout flips. The distortions are drawn lazily and
//! deterministically from the device seed and are not observable through the
//! sampling interface.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{qubo_to_ising, spins_to_bits, IsingModel, QuboModel};
use crate::seeds;
use crate::solvers::{SampleSet, SolverConfig, SpinSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Std dev of the hidden per-spin field offset.
    pub field_bias: f64,
    /// Std dev of the hidden per-coupler offset.
    pub coupling_bias: f64,
    /// Std dev of the relative gain error on submitted fields.
    pub field_gain: f64,
    pub readout_flip_prob: f64,
    /// Fraction of the previous batch magnetisation fed back as a field.
    pub autocorrelation_strength: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            field_bias: 0.0,
            coupling_bias: 0.0,
            field_gain: 0.0,
            readout_flip_prob: 0.0,
            autocorrelation_strength: 0.0,
            seed: 0,
        }
    }

    /// Default distortions of the `noisy:<seed>` device.
    pub fn noisy(seed: u64) -> Self {
        Self {
            field_bias: 0.05,
            coupling_bias: 0.05,
            field_gain: 0.1,
            readout_flip_prob: 0.002,
            autocorrelation_strength: 0.02,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let stds = [self.field_bias, self.coupling_bias, self.field_gain, self.autocorrelation_strength];
        if stds.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Config("noise scales must be finite and non-negative".into()));
        }
        if !(0.0..0.5).contains(&self.readout_flip_prob) {
            return Err(Error::Config("readout flip probability must lie in [0, 0.5)".into()));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.field_bias == 0.0
            && self.coupling_bias == 0.0
            && self.field_gain == 0.0
            && self.readout_flip_prob == 0.0
            && self.autocorrelation_strength == 0.0
    }
}

/// A simulated annealer with frozen hidden distortions and the corrections
/// applied so far. One calibration session owns a device at a time.
#[derive(Debug, Clone)]
pub struct Device {
    noise: NoiseModel,
    field_overrides: BTreeMap<usize, f64>,
    coupling_overrides: BTreeMap<(usize, usize), f64>,
    flux_offsets: Vec<f64>,
    corrections: QuboModel<f64>,
    last_magnetization: Vec<f64>,
    batches: u64,
}

fn gaussian(seed: u64, stream: &str, index: u64, std: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std).expect("validated std").sample(&mut seeds::rng(seed, stream, index))
}

fn pair_index(i: usize, j: usize) -> u64 {
    ((i.min(j) as u64) << 32) | j.max(i) as u64
}

pub fn create_device(noise: NoiseModel) -> Result<Device> {
    noise.validate()?;
    Ok(Device {
        noise,
        field_overrides: BTreeMap::new(),
        coupling_overrides: BTreeMap::new(),
        flux_offsets: Vec::new(),
        corrections: QuboModel::new(0),
        last_magnetization: Vec::new(),
        batches: 0,
    })
}

impl Device {
    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    fn field_bias(&self, i: usize) -> f64 {
        self.field_overrides
            .get(&i)
            .copied()
            .unwrap_or_else(|| gaussian(self.noise.seed, "field-bias", i as u64, self.noise.field_bias))
    }

    fn coupling_bias(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.coupling_overrides
            .get(&key)
            .copied()
            .unwrap_or_else(|| gaussian(self.noise.seed, "coupling-bias", pair_index(i, j), self.noise.coupling_bias))
    }

    fn field_gain(&self, i: usize) -> f64 {
        1.0 + gaussian(self.noise.seed, "field-gain", i as u64, self.noise.field_gain)
    }

    pub fn flux_offsets(&self) -> &[f64] {
        &self.flux_offsets
    }

    pub fn corrections(&self) -> &QuboModel<f64> {
        &self.corrections
    }

    /// Adds `offsets` to the per-spin flux offsets.
    pub fn apply_flux_offsets(&mut self, offsets: &[f64]) {
        if self.flux_offsets.len() < offsets.len() {
            self.flux_offsets.resize(offsets.len(), 0.0);
        }
        for (o, d) in self.flux_offsets.iter_mut().zip(offsets) {
            *o += d;
        }
    }

    /// Adds QUBO correction terms applied to every later submission.
    pub fn apply_corrections(&mut self, corrections: &QuboModel<f64>) {
        self.corrections.ensure_vars(corrections.num_vars());
        self.corrections.add_model(corrections);
    }

    pub fn clear_calibration(&mut self) {
        self.flux_offsets.clear();
        self.corrections = QuboModel::new(0);
    }

    /// Lets the device settle so the next batch carries no memory of the last one.
    pub fn rest(&mut self) {
        self.last_magnetization.clear();
    }

    /// The model the device actually anneals when `model` is submitted.
    fn effective_model(&self, model: &IsingModel<f64>) -> IsingModel<f64> {
        let n = model.num_vars();
        let mut eff = IsingModel::new(n);
        eff.add_offset(model.offset());
        for i in 0..n {
            let transient = self.last_magnetization.get(i).copied().unwrap_or(0.0);
            let flux = self.flux_offsets.get(i).copied().unwrap_or(0.0);
            eff.add_linear(
                i,
                model.linear_at(i) * self.field_gain(i) + self.field_bias(i) + flux
                    - self.noise.autocorrelation_strength * transient,
            );
        }
        let mut corr = self.corrections.clone();
        corr.ensure_vars(n);
        let corr = qubo_to_ising(&corr);
        for i in 0..n {
            eff.add_linear(i, corr.linear_at(i));
        }
        let mut couplers: BTreeMap<(usize, usize), f64> = model.quadratic().clone();
        for (&(i, j), &c) in corr.quadratic() {
            if j < n {
                *couplers.entry((i, j)).or_default() += c;
            }
        }
        for ((i, j), c) in couplers {
            eff.add_quadratic(i, j, c + self.coupling_bias(i, j));
        }
        eff
    }

    /// Samples `model` through the distortions. Energies in the returned set
    /// are those of the submitted model.
    pub fn sample(&mut self, model: &IsingModel<f64>, cfg: &SolverConfig) -> Result<SampleSet<f64>> {
        cfg.validate()?;
        let eff = self.effective_model(model);
        let batch = self.batches;
        self.batches += 1;
        let root = seeds::derive_seed(cfg.seed, "device", self.noise.seed);
        let mut states =
            SpinSystem::from_ising(&eff).sample(&SolverConfig { seed: root, ..cfg.clone() }, "batch", batch);
        if self.noise.readout_flip_prob > 0.0 {
            let mut rng = seeds::rng(root, "readout", batch);
            for s in states.iter_mut() {
                for v in s.iter_mut() {
                    if rng.random::<f64>() < self.noise.readout_flip_prob {
                        *v = -*v;
                    }
                }
            }
        }
        let n = model.num_vars();
        let shots = states.len().max(1) as f64;
        self.last_magnetization = (0..n).map(|i| states.iter().map(|s| s[i] as f64).sum::<f64>() / shots).collect();
        Ok(SampleSet::from_states(model, states))
    }

    /// QUBO convenience wrapper around [`Device::sample`].
    pub fn sample_qubo(&mut self, model: &QuboModel<f64>, cfg: &SolverConfig) -> Result<SampleSet<f64>> {
        let spins = self.sample(&qubo_to_ising(model), cfg)?;
        Ok(SampleSet::from_states(model, spins.expanded_states().map(spins_to_bits)))
    }
}

/// Free-function form of [`Device::sample`].
pub fn device_sample(device: &mut Device, model: &IsingModel<f64>, cfg: &SolverConfig) -> Result<SampleSet<f64>> {
    device.sample(model, cfg)
}

/// Test-only view of the hidden distortions.
#[cfg(any(test, feature = "inspection"))]
pub mod inspection {
    use super::Device;

    pub fn hidden_field(device: &Device, i: usize) -> f64 {
        device.field_bias(i)
    }

    pub fn hidden_coupling(device: &Device, i: usize, j: usize) -> f64 {
        device.coupling_bias(i, j)
    }

    pub fn hidden_gain(device: &Device, i: usize) -> f64 {
        device.field_gain(i)
    }

    pub fn set_hidden_field(device: &mut Device, i: usize, value: f64) {
        device.field_overrides.insert(i, value);
    }

    pub fn set_hidden_coupling(device: &mut Device, i: usize, j: usize, value: f64) {
        device.coupling_overrides.insert((i.min(j), i.max(j)), value);
    }
}
