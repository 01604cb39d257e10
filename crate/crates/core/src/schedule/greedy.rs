use std::collections::BTreeMap;

use super::OccupancyState;
use crate::demand::BookingRequest;

/// Free-room subset with the fewest wasted beds, then fewest rooms, then
/// lowest room ids. Rooms of equal capacity are interchangeable, so the
/// search runs over how many rooms to take per capacity class.
pub fn greedy_rooms(state: &OccupancyState, request: &BookingRequest) -> Option<Vec<usize>> {
    let rooms = state.rooms();
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for r in state.free_rooms(request) {
        classes.entry(rooms[r].capacity).or_default().push(r);
    }
    for members in classes.values_mut() {
        members.sort_by_key(|&r| rooms[r].id);
    }
    let classes: Vec<(u32, Vec<usize>)> = classes.into_iter().rev().collect();
    let mut best: Option<(u32, usize, Vec<usize>)> = None;
    let mut counts = vec![0usize; classes.len()];
    search(&classes, request.beds, 0, 0, &mut counts, &mut |counts, total| {
        let mut ids: Vec<usize> = Vec::new();
        for ((_, members), &k) in classes.iter().zip(counts) {
            ids.extend(members[..k].iter().map(|&r| rooms[r].id));
        }
        ids.sort_unstable();
        let key = (total - request.beds, ids.len(), ids);
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    let (_, _, ids) = best?;
    Some(ids.into_iter().map(|id| state.room_index(id).expect("room from this state")).collect())
}

fn search(
    classes: &[(u32, Vec<usize>)],
    need: u32,
    class: usize,
    total: u32,
    counts: &mut [usize],
    visit: &mut dyn FnMut(&[usize], u32),
) {
    if total >= need {
        visit(counts, total);
        return;
    }
    if class == classes.len() {
        return;
    }
    let (cap, members) = &classes[class];
    let max_k = members.len().min((need - total).div_ceil(*cap) as usize);
    for k in 0..=max_k {
        counts[class] = k;
        search(classes, need, class + 1, total + cap * k as u32, counts, visit);
    }
    counts[class] = 0;
}

/// Books the greedy choice for `request`; returns the room indices, or
/// `None` when the free rooms cannot hold the team.
pub fn greedy_schedule(state: &mut OccupancyState, request: &BookingRequest) -> Option<Vec<usize>> {
    let rooms = greedy_rooms(state, request)?;
    state.assign(request, &rooms).expect("greedy only picks free rooms");
    Some(rooms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::RoomSpec;

    fn campus(caps: &[u32]) -> OccupancyState {
        let rooms = caps.iter().enumerate().map(|(id, &capacity)| RoomSpec { id, capacity }).collect();
        OccupancyState::new(rooms, 10).unwrap()
    }

    fn caps_of(state: &OccupancyState, rooms: &[usize]) -> Vec<u32> {
        rooms.iter().map(|&r| state.rooms()[r].capacity).collect()
    }

    #[test]
    fn examples() {
        let req = |beds| BookingRequest { id: 0, beds, start_day: 0, duration: 2 };
        let s = campus(&[8, 4, 4, 2]);
        assert_eq!(caps_of(&s, &greedy_rooms(&s, &req(8)).unwrap()), vec![8]);
        let s = campus(&[4, 4, 2]);
        assert_eq!(caps_of(&s, &greedy_rooms(&s, &req(5)).unwrap()), vec![4, 2]);
        let s = campus(&[4, 4]);
        assert_eq!(greedy_rooms(&s, &req(10)), None);
    }

    #[test]
    fn skips_booked_rooms() {
        let mut s = campus(&[8, 4, 4, 2]);
        let first = BookingRequest { id: 0, beds: 8, start_day: 0, duration: 5 };
        assert_eq!(greedy_schedule(&mut s, &first), Some(vec![0]));
        let second = BookingRequest { id: 1, beds: 6, start_day: 3, duration: 2 };
        let rooms = greedy_schedule(&mut s, &second).unwrap();
        assert_eq!(caps_of(&s, &rooms), vec![4, 2]);
        s.verify().unwrap();
    }
}
