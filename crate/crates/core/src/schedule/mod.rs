//! Room scheduling: overlap graphs, the occupancy calendar, the greedy and
//! hybrid schedulers, an exact planner and the failure harness.

mod collision;
mod exact;
mod greedy;
mod harness;
mod hybrid;
mod occupancy;

pub use collision::{build_collision_graph, CollisionGraph};
pub use exact::{exact_schedule, ExactObjective, ExactPlan};
pub use greedy::{greedy_rooms, greedy_schedule};
pub use harness::{
    average_curve, harness_stream, run_failure_harness, run_stream, stream_instance, CurvePoint, HarnessConfig, Method,
    RunTrace, Scheduler,
};
pub use hybrid::{hybrid_fits_all, hybrid_schedule, hybrid_value, HybridKind, HybridOutcome, ValueParams};
pub use occupancy::{check_feasibility, Assignment, Feasibility, OccupancyState, RejectReason};
