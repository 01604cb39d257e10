use serde::{Deserialize, Serialize};

use super::{build_collision_graph, OccupancyState};
use crate::demand::BookingRequest;
use crate::error::{Error, Result};
use crate::model::MvvcProblem;
use crate::solvers::MvvcSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HybridKind {
    /// `min(R, U)^α · D`.
    One,
    /// `min(R, U)^α · D · max(F_t)^k`.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValueParams {
    /// Preference for filling a room completely.
    pub alpha: f64,
    /// Exponent on the peak occupancy factor (Hybrid 2).
    pub occupancy_exponent: f64,
}

impl Default for ValueParams {
    fn default() -> Self {
        Self { alpha: 2.0, occupancy_exponent: 3.0 }
    }
}

impl ValueParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite() && self.occupancy_exponent.is_finite()) {
            return Err(Error::argument("value exponents must be finite with alpha > 0"));
        }
        Ok(())
    }
}

/// Value of placing a team with `unassigned` members left into a room of
/// `room_capacity` beds.
pub fn hybrid_value(
    kind: HybridKind,
    room_capacity: u32,
    unassigned: u32,
    duration: u32,
    max_occupancy: f64,
    params: &ValueParams,
) -> f64 {
    let fill = (room_capacity.min(unassigned) as f64).powf(params.alpha) * duration as f64;
    match kind {
        HybridKind::One => fill,
        HybridKind::Two => fill * max_occupancy.powf(params.occupancy_exponent),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HybridOutcome {
    pub accepted: Vec<usize>,
    pub rejected: Vec<usize>,
}

struct Pass<'a> {
    kind: HybridKind,
    params: &'a ValueParams,
    solver: &'a dyn MvvcSolver,
}

impl Pass<'_> {
    /// Fills rooms one at a time, largest first, until no room takes anyone.
    /// `unassigned[k]` tracks members of `teams[k]` still without a bed.
    fn run(&self, state: &mut OccupancyState, teams: &[BookingRequest], unassigned: &mut [u32]) -> Result<()> {
        let mut order: Vec<usize> = (0..state.rooms().len()).collect();
        order.sort_by_key(|&r| (std::cmp::Reverse(state.rooms()[r].capacity), state.rooms()[r].id));
        let total_beds = state.total_beds().max(1) as f64;
        loop {
            let mut progress = false;
            for &room in &order {
                let cap = state.rooms()[room].capacity;
                let cands: Vec<usize> =
                    (0..teams.len()).filter(|&k| unassigned[k] > 0 && state.is_free(room, teams[k].days())).collect();
                if cands.is_empty() {
                    continue;
                }
                let occupancy = |day: u32| {
                    let pending: u32 =
                        (0..teams.len()).filter(|&k| teams[k].days().contains(&day)).map(|k| unassigned[k]).sum();
                    (state.members_on(day) + pending) as f64 / total_beds
                };
                let requests: Vec<BookingRequest> = cands.iter().map(|&k| teams[k]).collect();
                let values: Vec<f64> = cands
                    .iter()
                    .map(|&k| {
                        let peak = teams[k].days().map(occupancy).fold(0.0, f64::max);
                        hybrid_value(self.kind, cap, unassigned[k], teams[k].duration, peak, self.params)
                    })
                    .collect();
                let problem = MvvcProblem::new(build_collision_graph(&requests).graph, values)?;
                let selected = self.solver.solve(&problem)?;
                if !problem.graph.is_independent(&selected) {
                    return Err(Error::argument("MVVC solver returned overlapping teams"));
                }
                for (pos, &k) in cands.iter().enumerate() {
                    if selected[pos] && problem.values[pos] > 0.0 {
                        state.assign(&teams[k], &[room])?;
                        unassigned[k] -= cap.min(unassigned[k]);
                        progress = true;
                    }
                }
            }
            if !progress {
                return Ok(());
            }
        }
    }
}

/// Hybrid scheduling of `pending` on top of `state`.
///
/// Each pass hands every room, largest first, to an MVVC instance over the
/// teams that still need beds and fit its free dates. Teams left partially
/// placed after a pass are rolled back; the one with the largest unmet share
/// is rejected and the rest are tried again on the freed rooms.
pub fn hybrid_schedule(
    state: &mut OccupancyState,
    pending: &[BookingRequest],
    kind: HybridKind,
    params: &ValueParams,
    solver: &dyn MvvcSolver,
) -> Result<HybridOutcome> {
    params.validate()?;
    let pass = Pass { kind, params, solver };
    let mut teams: Vec<BookingRequest> = pending.to_vec();
    teams.sort_by_key(|r| r.id);
    let mut outcome = HybridOutcome::default();
    while !teams.is_empty() {
        let mut unassigned: Vec<u32> = teams.iter().map(|r| r.beds).collect();
        pass.run(state, &teams, &mut unassigned)?;
        let partial: Vec<usize> =
            (0..teams.len()).filter(|&k| unassigned[k] > 0 && unassigned[k] < teams[k].beds).collect();
        let mut keep = Vec::new();
        for (k, team) in teams.iter().enumerate() {
            if unassigned[k] == 0 {
                outcome.accepted.push(team.id);
            } else if partial.is_empty() {
                outcome.rejected.push(team.id);
            } else {
                state.unassign(team.id);
                keep.push(k);
            }
        }
        if let Some(&worst) = partial.iter().max_by(|&&a, &&b| {
            let share = |k: usize| unassigned[k] as f64 / teams[k].beds as f64;
            share(a).total_cmp(&share(b)).then(teams[a].id.cmp(&teams[b].id))
        }) {
            outcome.rejected.push(teams[worst].id);
            keep.retain(|&k| k != worst);
        }
        teams = keep.into_iter().map(|k| teams[k]).collect();
    }
    outcome.accepted.sort_unstable();
    outcome.rejected.sort_unstable();
    Ok(outcome)
}

/// Runs a single hybrid pass and returns the new state only if every team in
/// `pending` is fully placed.
pub fn hybrid_fits_all(
    state: &OccupancyState,
    pending: &[BookingRequest],
    kind: HybridKind,
    params: &ValueParams,
    solver: &dyn MvvcSolver,
) -> Result<Option<OccupancyState>> {
    params.validate()?;
    let mut next = state.clone();
    let mut teams: Vec<BookingRequest> = pending.to_vec();
    teams.sort_by_key(|r| r.id);
    let mut unassigned: Vec<u32> = teams.iter().map(|r| r.beds).collect();
    Pass { kind, params, solver }.run(&mut next, &teams, &mut unassigned)?;
    Ok(unassigned.iter().all(|&u| u == 0).then_some(next))
}
