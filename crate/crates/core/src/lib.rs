//! Hybrid room scheduling with QUBO/Ising reformulations, an annealer stand-in
//! and problem-aware calibration of a simulated noisy annealer.

pub mod calibration;
pub mod demand;
pub mod device;
pub mod error;
pub mod graph;
pub mod model;
pub mod scalar;
pub mod schedule;
pub mod seeds;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::Graph;
pub use scalar::Scalar;

use num_rational::Rational64;

/// Double-precision QUBO model.
pub type Qubo = model::QuboModel<f64>;
/// Double-precision Ising model.
pub type Ising = model::IsingModel<f64>;
/// Single-precision QUBO model.
pub type Qubo32 = model::QuboModel<f32>;
/// Single-precision Ising model.
pub type Ising32 = model::IsingModel<f32>;
/// Exact rational QUBO model.
pub type ExactQubo = model::QuboModel<Rational64>;
/// Exact rational Ising model.
pub type ExactIsing = model::IsingModel<Rational64>;
