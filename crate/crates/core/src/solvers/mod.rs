//! Exact and sampling solvers for quadratic models.

mod descent;
mod exact;
mod mwis;
mod sa;
mod samples;

pub use descent::{postprocess, steepest_descent};
pub use exact::{
    branch_and_bound, brute_force_minimum, enumerate_minima, exact_solve, ExactSolution, BRANCH_AND_BOUND_LIMIT,
    ENUMERATION_LIMIT, MAX_MINIMA,
};
pub use mwis::{repair_selection, selection_value, AnnealedMvvc, ExactMvvc, MvvcSolver};
pub(crate) use sa::SpinSystem;
pub use sa::{sa_sample, sa_sample_qubo, SolverConfig};
pub use samples::{quantile_energy, Sample, SampleSet};
