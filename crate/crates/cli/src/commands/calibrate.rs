//! `calibrate`.

use std::path::PathBuf;

use annealsched::calibration::{
    calibrate_pairwise, flux_bias_calibrate, offset_scale_calibrate, CalibrationState, FluxConfig, PairwiseConfig,
    ScaleConfig,
};
use annealsched::device::create_device;
use clap::Args;

use super::Context;
use crate::config::DeviceSpec;
use crate::error::{CliError, CliResult};
use crate::io;

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// ideal or noisy:<seed>; overrides the config device.
    #[arg(long)]
    pub device: Option<DeviceSpec>,
    /// Monte Carlo trajectories of the reference statistics.
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Also fit the per-vertex response widths.
    #[arg(long)]
    pub widths: bool,
    #[arg(long, default_value = "calib.json")]
    pub out: PathBuf,
}

pub fn calibrate(ctx: &Context, args: &CalibrateArgs) -> CliResult<()> {
    let graph = io::read_graph(&args.graph)?.graph()?;
    let calib = &ctx.cfg.calibration;
    let mut device_cfg = ctx.cfg.device.clone();
    if let Some(spec) = args.device {
        device_cfg.spec = spec;
    }
    let mut device = create_device(device_cfg.noise_model())?;

    let flux = FluxConfig { seed: ctx.seed("flux"), ..calib.flux.clone() };
    let offsets = flux_bias_calibrate(&mut device, graph.num_vertices(), &flux)?;

    let mut pairwise = PairwiseConfig { seed: ctx.seed("pairwise"), ..calib.pairwise.clone() };
    if let Some(t) = args.trajectories {
        if t == 0 {
            return Err(CliError::Usage("--trajectories must be positive".into()));
        }
        pairwise.trajectories = t;
    }
    let result = calibrate_pairwise(&mut device, &graph, &pairwise)?;
    println!(
        "pairwise calibration converged after {} iterations: mean |delta| {:.5} (sigma {:.5})",
        result.iterations,
        result.trace.last().copied().unwrap_or(f64::NAN),
        result.sigma
    );
    let mut state = CalibrationState::from_parts(offsets, result);

    if args.widths || calib.fit_widths {
        let scale = ScaleConfig { seed: ctx.seed("scale"), ..calib.scale.clone() };
        for v in 0..graph.num_vertices() {
            let fit = offset_scale_calibrate(&mut device, &graph, v, &scale)?;
            state.vertex_fits.insert(v, fit.fit);
        }
        println!("fitted response widths for {} vertices", graph.num_vertices());
    }
    let out = ctx.output(&args.out);
    io::write_json(&out, &state)?;
    println!("wrote {}", out.display());
    Ok(())
}
