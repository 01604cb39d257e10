mod anneal;
mod calibrate;
mod scheduling;

use std::path::{Path, PathBuf};

use annealsched::seeds;

pub use anneal::{qubo, solve, sweep_anneal, QuboArgs, SolveArgs, SweepArgs, SweepRow};
pub use calibrate::{calibrate, CalibrateArgs};
pub use scheduling::{compare, gen_stream, schedule, CompareArgs, GenStreamArgs, ScheduleArgs};

use crate::config::ExperimentConfig;
use crate::io;

/// Resolved configuration shared by every subcommand.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn output(&self, file: &Path) -> PathBuf {
        io::output_path(&self.out_dir, file)
    }

    /// Seed of a named sub-stream of the top-level seed.
    pub fn seed(&self, stream: &str) -> u64 {
        seeds::derive_seed(self.cfg.seed, stream, 0)
    }
}
