use std::collections::BTreeMap;

use crate::demand::{BookingRequest, RoomSpec};
use crate::error::{Error, Result};

/// Rooms held by one accepted (or partially assigned) request.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub request: BookingRequest,
    /// Room indices into [`OccupancyState::rooms`].
    pub rooms: Vec<usize>,
}

impl Assignment {
    pub fn capacity(&self, rooms: &[RoomSpec]) -> u32 {
        self.rooms.iter().map(|&r| rooms[r].capacity).sum()
    }
}

/// Room-by-day calendar of a campus.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyState {
    rooms: Vec<RoomSpec>,
    horizon: u32,
    /// `grid[room][day]`: request id holding the room that day.
    grid: Vec<Vec<Option<usize>>>,
    assignments: BTreeMap<usize, Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// A proposed room is already booked on one of the requested dates.
    Conflict { room_id: usize, day: u32 },
    /// The proposed rooms hold fewer beds than requested.
    Capacity { available: u32, requested: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Accept,
    Reject(RejectReason),
}

impl OccupancyState {
    pub fn new(rooms: Vec<RoomSpec>, horizon: u32) -> Result<Self> {
        let mut ids: Vec<usize> = rooms.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != rooms.len() {
            return Err(Error::argument("room ids must be unique"));
        }
        if rooms.iter().any(|r| r.capacity == 0) {
            return Err(Error::argument("room capacity must be at least 1"));
        }
        let grid = vec![vec![None; horizon as usize]; rooms.len()];
        Ok(Self { rooms, horizon, grid, assignments: BTreeMap::new() })
    }

    pub fn rooms(&self) -> &[RoomSpec] {
        &self.rooms
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn total_beds(&self) -> u32 {
        self.rooms.iter().map(|r| r.capacity).sum()
    }

    pub fn room_index(&self, room_id: usize) -> Result<usize> {
        self.rooms
            .iter()
            .position(|r| r.id == room_id)
            .ok_or_else(|| Error::argument(format!("unknown room id {room_id}")))
    }

    fn check_horizon(&self, request: &BookingRequest) -> Result<()> {
        if request.duration == 0 || request.end_day() > self.horizon {
            return Err(Error::argument(format!(
                "request {} occupies days {:?} outside the {}-day horizon",
                request.id,
                request.days(),
                self.horizon
            )));
        }
        Ok(())
    }

    /// First day in `days` on which the room is taken.
    pub fn first_conflict(&self, room: usize, days: std::ops::Range<u32>) -> Option<u32> {
        days.into_iter().find(|&d| self.grid[room][d as usize].is_some())
    }

    pub fn is_free(&self, room: usize, days: std::ops::Range<u32>) -> bool {
        self.first_conflict(room, days).is_none()
    }

    /// Indices of rooms free on every date of `request`.
    pub fn free_rooms(&self, request: &BookingRequest) -> Vec<usize> {
        (0..self.rooms.len()).filter(|&r| self.is_free(r, request.days())).collect()
    }

    /// Books `rooms` (indices) for `request`, adding to any rooms it already holds.
    pub fn assign(&mut self, request: &BookingRequest, rooms: &[usize]) -> Result<()> {
        self.check_horizon(request)?;
        for &r in rooms {
            if r >= self.rooms.len() {
                return Err(Error::argument(format!("room index {r} out of range")));
            }
            if let Some(day) = self.first_conflict(r, request.days()) {
                return Err(Error::argument(format!("room {} is already booked on day {day}", self.rooms[r].id)));
            }
        }
        let entry =
            self.assignments.entry(request.id).or_insert_with(|| Assignment { request: *request, rooms: Vec::new() });
        for &r in rooms {
            for d in request.days() {
                self.grid[r][d as usize] = Some(request.id);
            }
            entry.rooms.push(r);
        }
        entry.rooms.sort_unstable();
        Ok(())
    }

    /// Frees every room held by a request.
    pub fn unassign(&mut self, request_id: usize) -> Option<Assignment> {
        let a = self.assignments.remove(&request_id)?;
        for &r in &a.rooms {
            for d in a.request.days() {
                self.grid[r][d as usize] = None;
            }
        }
        Some(a)
    }

    pub fn assignment(&self, request_id: usize) -> Option<&Assignment> {
        self.assignments.get(&request_id)
    }

    pub fn assignments(&self) -> impl Iterator<Item = &Assignment> {
        self.assignments.values()
    }

    /// Requests whose rooms hold all their beds.
    pub fn is_complete(&self, request_id: usize) -> bool {
        self.assignments.get(&request_id).is_some_and(|a| a.capacity(&self.rooms) >= a.request.beds)
    }

    /// Team members placed on `day`, each request counting at most its bed request.
    pub fn members_on(&self, day: u32) -> u32 {
        self.assignments
            .values()
            .filter(|a| a.request.days().contains(&day))
            .map(|a| a.capacity(&self.rooms).min(a.request.beds))
            .sum()
    }

    /// Requested bed-days of complete assignments over total bed-days of the horizon.
    pub fn filling_factor(&self) -> f64 {
        let used: u64 = self
            .assignments
            .values()
            .filter(|a| a.capacity(&self.rooms) >= a.request.beds)
            .map(|a| a.request.bed_days())
            .sum();
        let total = self.total_beds() as u64 * self.horizon as u64;
        if total == 0 {
            0.0
        } else {
            used as f64 / total as f64
        }
    }

    /// Checks by direct scan that no room-day is shared and every recorded
    /// assignment holds enough beds.
    pub fn verify(&self) -> Result<()> {
        let mut seen = vec![vec![None; self.horizon as usize]; self.rooms.len()];
        for a in self.assignments.values() {
            if a.capacity(&self.rooms) < a.request.beds {
                return Err(Error::argument(format!("request {} holds too few beds", a.request.id)));
            }
            for &r in &a.rooms {
                for d in a.request.days() {
                    let cell = &mut seen[r][d as usize];
                    if let Some(other) = *cell {
                        return Err(Error::argument(format!(
                            "room {} shared by requests {other} and {} on day {d}",
                            self.rooms[r].id, a.request.id
                        )));
                    }
                    *cell = Some(a.request.id);
                }
            }
        }
        if seen != self.grid {
            return Err(Error::argument("calendar out of sync with assignments"));
        }
        Ok(())
    }
}

/// Decides whether `request` can take the rooms `room_ids` in `state`.
pub fn check_feasibility(state: &OccupancyState, request: &BookingRequest, room_ids: &[usize]) -> Result<Feasibility> {
    let mut available = 0;
    for &id in room_ids {
        let r = state.room_index(id)?;
        if let Some(day) = state.first_conflict(r, request.days()) {
            return Ok(Feasibility::Reject(RejectReason::Conflict { room_id: id, day }));
        }
        available += state.rooms[r].capacity;
    }
    if available < request.beds {
        return Ok(Feasibility::Reject(RejectReason::Capacity { available, requested: request.beds }));
    }
    Ok(Feasibility::Accept)
}
