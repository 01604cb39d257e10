use serde::{Deserialize, Serialize};

use super::pairwise::cover_qubo;
use super::sigmoid::{fit_sigmoid, SigmoidFit};
use crate::device::Device;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seeds;
use crate::solvers::SolverConfig;

/// How the fitted width is applied to intended values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleDirection {
    /// `value · 3w`: vertices that respond weakly (wide transition) get larger values.
    #[default]
    Multiply,
    /// `value / 3w`.
    Divide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    /// Inclusion rewards `V` probed; the vertex gets the QUBO term `-V x_v`.
    pub probes: Vec<f64>,
    pub shots: usize,
    pub edge_penalty: f64,
    pub sampler: SolverConfig,
    pub seed: u64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            probes: (0..26).map(|k| -1.0 + 0.1 * k as f64).collect(),
            shots: 1000,
            edge_penalty: 1.0,
            sampler: SolverConfig { sweeps: 100, ..SolverConfig::default() },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexScale {
    pub vertex: usize,
    pub fit: SigmoidFit,
    /// Multiplier `3w`; `tanh(1.5)` puts the `±3w/2` band at about 95 % of the transition.
    pub scale: f64,
}

/// Inclusion frequency of `vertex` for each probe reward on the cover problem.
pub fn inclusion_curve(device: &mut Device, graph: &Graph, vertex: usize, cfg: &ScaleConfig) -> Result<Vec<f64>> {
    if vertex >= graph.num_vertices() {
        return Err(Error::argument(format!("vertex {vertex} not in graph")));
    }
    let base = cover_qubo(graph, cfg.edge_penalty)?;
    cfg.probes
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut q = base.clone();
            q.add_linear(vertex, -v);
            device.rest();
            let sampler = SolverConfig {
                num_samples: cfg.shots,
                seed: seeds::derive_seed(cfg.seed, "scale-probe", (vertex as u64) << 32 | k as u64),
                ..cfg.sampler.clone()
            };
            let set = device.sample_qubo(&q, &sampler)?;
            let hits: usize = set.iter().filter(|s| s.state[vertex] == 1).map(|s| s.count).sum();
            Ok(hits as f64 / set.total_count() as f64)
        })
        .collect()
}

/// Probes one vertex with rewards `cfg.probes`, fits the inclusion curve and
/// returns the fit with the multiplier `3w`.
pub fn offset_scale_calibrate(
    device: &mut Device,
    graph: &Graph,
    vertex: usize,
    cfg: &ScaleConfig,
) -> Result<VertexScale> {
    let observed = inclusion_curve(device, graph, vertex, cfg)?;
    let fit = fit_sigmoid(&cfg.probes, &observed).map_err(|e| match e {
        Error::Calibration { reason, trace } => {
            Error::Calibration { reason: format!("vertex {vertex}: {reason}"), trace }
        }
        other => other,
    })?;
    Ok(VertexScale { vertex, fit, scale: 3.0 * fit.w })
}

/// Applies per-vertex multipliers `3 w_i` to `values`.
pub fn scaled_values(values: &[f64], widths: &[Option<f64>], direction: ScaleDirection) -> Result<Vec<f64>> {
    if widths.len() < values.len() {
        return Err(Error::argument("fewer widths than values"));
    }
    values
        .iter()
        .zip(widths)
        .enumerate()
        .map(|(i, (&v, w))| match *w {
            Some(w) if w > 0.0 => Ok(match direction {
                ScaleDirection::Multiply => v * 3.0 * w,
                ScaleDirection::Divide => v / (3.0 * w),
            }),
            Some(w) => Err(Error::argument(format!("width {w} of vertex {i} is not positive"))),
            None => Err(Error::argument(format!("no width for vertex {i}"))),
        })
        .collect()
}
