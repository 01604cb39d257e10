use std::collections::HashMap;

use super::OccupancyState;
use crate::demand::BookingRequest;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactObjective {
    /// Accept the subset of requests with the most requested bed-days.
    MaxBedDays,
    /// Place every request or report infeasibility.
    AcceptAll,
}

/// Optimal room plan found by [`exact_schedule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPlan {
    /// `(request, room indices)` of every accepted request.
    pub accepted: Vec<(BookingRequest, Vec<usize>)>,
    pub rejected: Vec<usize>,
    pub bed_days: u64,
}

impl ExactPlan {
    pub fn apply(&self, state: &mut OccupancyState) -> Result<()> {
        for (req, rooms) in &self.accepted {
            state.assign(req, rooms)?;
        }
        Ok(())
    }
}

type Key = (usize, Vec<(u32, u128)>);

struct Search<'a> {
    caps: Vec<u32>,
    requests: &'a [BookingRequest],
    objective: ExactObjective,
    memo: HashMap<Key, Option<u64>>,
    max_states: usize,
}

fn day_mask(req: &BookingRequest) -> u128 {
    let width = req.duration.min(128);
    let ones = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
    ones << req.start_day
}

impl Search<'_> {
    fn key(&self, k: usize, masks: &[u128]) -> Key {
        let start = self.requests.get(k).map_or(128, |r| r.start_day);
        let keep = if start >= 128 { 0 } else { u128::MAX << start };
        let mut rooms: Vec<(u32, u128)> = self.caps.iter().zip(masks).map(|(&c, &m)| (c, m & keep)).collect();
        rooms.sort_unstable();
        (k, rooms)
    }

    /// Minimal room multisets covering request `k`, as lists of room indices
    /// taking the lowest index within each interchangeable class.
    fn covers(&self, k: usize, masks: &[u128]) -> Vec<Vec<usize>> {
        let req = &self.requests[k];
        let need = day_mask(req);
        let keep = u128::MAX << req.start_day;
        let mut classes: Vec<((u32, u128), Vec<usize>)> = Vec::new();
        for r in 0..self.caps.len() {
            if masks[r] & need != 0 {
                continue;
            }
            let key = (self.caps[r], masks[r] & keep);
            match classes.iter_mut().find(|(c, _)| *c == key) {
                Some((_, rooms)) => rooms.push(r),
                None => classes.push((key, vec![r])),
            }
        }
        classes.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        cover_search(&classes, req.beds, 0, 0, &mut chosen, &mut out);
        out
    }

    fn best(&mut self, k: usize, masks: &mut Vec<u128>) -> Result<Option<u64>> {
        if k == self.requests.len() {
            return Ok(Some(0));
        }
        let key = self.key(k, masks);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let req = self.requests[k];
        let need = day_mask(&req);
        let mut best: Option<u64> = None;
        for cover in self.covers(k, masks) {
            for &r in &cover {
                masks[r] |= need;
            }
            let rest = self.best(k + 1, masks)?;
            for &r in &cover {
                masks[r] &= !need;
            }
            if let Some(v) = rest {
                best = best.max(Some(v + req.bed_days()));
            }
            if self.objective == ExactObjective::AcceptAll && best.is_some() {
                break;
            }
        }
        if self.objective == ExactObjective::MaxBedDays {
            best = best.max(self.best(k + 1, masks)?);
        }
        if self.memo.len() >= self.max_states {
            return Err(Error::Capacity(format!("exact scheduler exceeded {} states", self.max_states)));
        }
        self.memo.insert(key, best);
        Ok(best)
    }
}

fn cover_search(
    classes: &[((u32, u128), Vec<usize>)],
    need: u32,
    class: usize,
    total: u32,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if class == classes.len() {
        return;
    }
    let ((cap, _), rooms) = &classes[class];
    let base = chosen.len();
    cover_search(classes, need, class + 1, total, chosen, out);
    let mut t = total;
    for &r in rooms {
        chosen.push(r);
        t += cap;
        if t >= need {
            // Classes run largest first, so dropping any room now leaves too few beds.
            out.push(chosen.clone());
            break;
        }
        cover_search(classes, need, class + 1, t, chosen, out);
    }
    chosen.truncate(base);
}

/// Exact room planning by memoised search over requests in start order.
///
/// The memo key is the multiset of `(capacity, future busy days)` over all
/// rooms, so rooms that can no longer be told apart collapse into one state.
/// Horizons up to 128 days are supported.
pub fn exact_schedule(
    state: &OccupancyState,
    requests: &[BookingRequest],
    objective: ExactObjective,
    max_states: usize,
) -> Result<Option<ExactPlan>> {
    if state.horizon() > 128 {
        return Err(Error::Capacity(format!("exact scheduler supports 128 days, got {}", state.horizon())));
    }
    for r in requests {
        if r.duration == 0 || r.end_day() > state.horizon() {
            return Err(Error::argument(format!("request {} falls outside the horizon", r.id)));
        }
    }
    let mut ordered = requests.to_vec();
    ordered.sort_by_key(|r| (r.start_day, r.id));
    let mut masks: Vec<u128> = (0..state.rooms().len())
        .map(|r| (0..state.horizon()).filter(|&d| !state.is_free(r, d..d + 1)).fold(0u128, |m, d| m | 1 << d))
        .collect();
    let mut search = Search {
        caps: state.rooms().iter().map(|r| r.capacity).collect(),
        requests: &ordered,
        objective,
        memo: HashMap::new(),
        max_states,
    };
    let Some(total) = search.best(0, &mut masks)? else {
        return Ok(None);
    };
    // Replay the memo to recover one optimal plan, accepting whenever possible.
    let mut plan = ExactPlan { accepted: Vec::new(), rejected: Vec::new(), bed_days: total };
    let mut remaining = total;
    for k in 0..ordered.len() {
        let req = ordered[k];
        let need = day_mask(&req);
        let mut placed = false;
        for cover in search.covers(k, &masks) {
            if remaining < req.bed_days() {
                break;
            }
            for &r in &cover {
                masks[r] |= need;
            }
            if search.best(k + 1, &mut masks)? == Some(remaining - req.bed_days()) {
                remaining -= req.bed_days();
                plan.accepted.push((req, cover));
                placed = true;
                break;
            }
            for &r in &cover {
                masks[r] &= !need;
            }
        }
        if !placed {
            plan.rejected.push(req.id);
        }
    }
    debug_assert_eq!(remaining, 0);
    Ok(Some(plan))
}
