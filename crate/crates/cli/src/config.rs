use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use annealsched::calibration::{FluxConfig, PairwiseConfig, ScaleConfig, ScaleDirection};
use annealsched::demand::{CampusConfig, DemandModel};
use annealsched::device::NoiseModel;
use annealsched::schedule::{HarnessConfig, Method};
use annealsched::solvers::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "ANNEALSCHED_OUT_DIR";

/// Which sampler backs `solve` and `calibrate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DeviceSpec {
    #[default]
    Ideal,
    Noisy(u64),
}

impl FromStr for DeviceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "ideal" => Ok(DeviceSpec::Ideal),
            Some(("noisy", seed)) => {
                seed.parse().map(DeviceSpec::Noisy).map_err(|_| format!("bad device seed `{seed}`"))
            }
            _ => Err(format!("unknown device `{s}` (expected ideal or noisy:<seed>)")),
        }
    }
}

impl TryFrom<String> for DeviceSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<DeviceSpec> for String {
    fn from(d: DeviceSpec) -> String {
        d.to_string()
    }
}

impl fmt::Display for DeviceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviceSpec::Ideal => write!(f, "ideal"),
            DeviceSpec::Noisy(seed) => write!(f, "noisy:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    pub spec: DeviceSpec,
    /// Distortions of a noisy device; the seed comes from `spec`.
    pub noise: NoiseModel,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self { spec: DeviceSpec::Ideal, noise: NoiseModel::noisy(0) }
    }
}

impl DeviceConfig {
    pub fn noise_model(&self) -> NoiseModel {
        match self.spec {
            DeviceSpec::Ideal => NoiseModel::ideal(),
            DeviceSpec::Noisy(seed) => NoiseModel { seed, ..self.noise.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub flux: FluxConfig,
    pub pairwise: PairwiseConfig,
    pub scale: ScaleConfig,
    /// Fit a sigmoid per vertex after the pairwise pass.
    pub fit_widths: bool,
    pub direction: ScaleDirection,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            flux: FluxConfig::default(),
            pairwise: PairwiseConfig::default(),
            scale: ScaleConfig::default(),
            fit_widths: false,
            direction: ScaleDirection::Multiply,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scales: Vec<u32>,
    pub sweeps: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    pub quantiles: Vec<f64>,
    pub realizations: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scales: vec![1, 2],
            sweeps: vec![1, 3, 10, 30, 100, 300, 1000],
            sample_sizes: vec![1000],
            quantiles: vec![0.05, 0.25],
            realizations: 7,
        }
    }
}

/// Top-level experiment description read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Campus scaling factor `s`.
    pub scale: u32,
    pub output_dir: PathBuf,
    /// Demand model; defaults to the model for `scale`.
    pub demand: Option<DemandModel>,
    /// Campus; defaults to the standard mix at `scale`.
    pub campus: Option<CampusConfig>,
    pub harness: HarnessConfig,
    pub methods: Vec<Method>,
    /// Stream seeds of `compare`.
    pub seeds: Vec<u64>,
    pub solver: SolverConfig,
    pub device: DeviceConfig,
    pub calibration: CalibrationConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scale: 1,
            output_dir: PathBuf::from("out"),
            demand: None,
            campus: None,
            harness: HarnessConfig::default(),
            methods: vec![Method::Greedy, Method::Hybrid1, Method::Hybrid2],
            seeds: (0..50).collect(),
            solver: SolverConfig::default(),
            device: DeviceConfig::default(),
            calibration: CalibrationConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::input(path, e))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.scale == 0 {
            return Err(CliError::Config("scale must be at least 1".into()));
        }
        if self.harness.test_days == 0 {
            return Err(CliError::Config("harness needs a test period".into()));
        }
        self.harness.values.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.solver.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.device.noise.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.demand().validate()?;
        Ok(())
    }

    pub fn demand(&self) -> DemandModel {
        self.demand.clone().unwrap_or_else(|| DemandModel::for_scale(self.scale))
    }

    pub fn campus(&self) -> CliResult<CampusConfig> {
        match &self.campus {
            Some(c) => Ok(c.clone()),
            None => Ok(CampusConfig::default_for_scale(self.scale)?),
        }
    }

    /// Output directory: the environment override, then the flag, then the config.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => flag.map(Path::to_path_buf).unwrap_or_else(|| self.output_dir.clone()),
        }
    }
}
