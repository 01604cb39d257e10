use super::QuboModel;
use crate::demand::{BookingRequest, RoomSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Penalty and reward weights of the full room-assignment QUBO.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullProblemWeights<T> {
    /// Constraint penalty `λ`.
    pub penalty: T,
    /// Acceptance reward `μ`, kept well below `λ`.
    pub reward: T,
}

impl<T: Scalar> Default for FullProblemWeights<T> {
    fn default() -> Self {
        Self { penalty: T::from_int(10), reward: T::one() }
    }
}

/// QUBO over room-assignment bits `a[x][i]` and slack bits `H_x` for every request.
///
/// Variable layout per request `x`: `num_rooms` assignment bits followed by
/// `slack_weights.len()` slack bits.
#[derive(Debug, Clone)]
pub struct FullProblemQubo<T> {
    pub model: QuboModel<T>,
    pub num_requests: usize,
    pub num_rooms: usize,
    /// Binary weights of the slack bits; they span `[0, S_max - 1]` exactly.
    pub slack_weights: Vec<u32>,
}

impl<T: Scalar> FullProblemQubo<T> {
    pub fn vars_per_request(&self) -> usize {
        self.num_rooms + self.slack_weights.len()
    }

    pub fn assignment_var(&self, request: usize, room: usize) -> usize {
        request * self.vars_per_request() + room
    }

    pub fn slack_var(&self, request: usize, bit: usize) -> usize {
        request * self.vars_per_request() + self.num_rooms + bit
    }

    /// Room indices assigned to each request.
    pub fn decode_rooms(&self, state: &[i8]) -> Vec<Vec<usize>> {
        (0..self.num_requests)
            .map(|x| (0..self.num_rooms).filter(|&i| state[self.assignment_var(x, i)] == 1).collect())
            .collect()
    }

    /// Slack value `H_x` of each request.
    pub fn decode_slack(&self, state: &[i8]) -> Vec<u32> {
        (0..self.num_requests)
            .map(|x| {
                self.slack_weights
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| state[self.slack_var(x, b)] == 1)
                    .map(|(_, &w)| w)
                    .sum()
            })
            .collect()
    }
}

/// Slack bit weights `1, 2, 4, …` with the top bit trimmed so the range is `[0, S_max - 1]`.
pub(crate) fn slack_weights(max_capacity: u32) -> Vec<u32> {
    if max_capacity <= 1 {
        return Vec::new();
    }
    let bits = u32::BITS - (max_capacity - 1).leading_zeros();
    let mut w: Vec<u32> = (0..bits - 1).map(|b| 1 << b).collect();
    let covered = (1u32 << (bits - 1)) - 1;
    w.push((max_capacity - 1) - covered);
    w
}

/// Full scheduling problem as a QUBO:
///
/// `λ Σ_x (Σ_i s_i a_xi - R_x - H_x)² + λ Σ_{x<y overlapping} Σ_i a_xi a_yi - μ Σ_x Σ_i s_i a_xi / R_x`.
///
/// The first term turns the bed-count inequality into an equality with slack,
/// the second forbids sharing a room on a common date, and the reward favours
/// assigning capacity to requests.
pub fn full_problem_qubo<T: Scalar>(
    requests: &[BookingRequest],
    rooms: &[RoomSpec],
    weights: FullProblemWeights<T>,
) -> Result<FullProblemQubo<T>> {
    if !(weights.penalty > T::zero()) {
        return Err(Error::argument("constraint penalty must be positive"));
    }
    if requests.iter().any(|r| r.beds == 0) {
        return Err(Error::argument("requests must ask for at least one bed"));
    }
    let s_max = rooms.iter().map(|r| r.capacity).max().unwrap_or(0);
    let slack = slack_weights(s_max);
    let layout = FullProblemQubo {
        model: QuboModel::new(requests.len() * (rooms.len() + slack.len())),
        num_requests: requests.len(),
        num_rooms: rooms.len(),
        slack_weights: slack,
    };
    let mut model = QuboModel::new(layout.model.num_vars());
    let lambda = weights.penalty;

    for (x, req) in requests.iter().enumerate() {
        let mut terms: Vec<(usize, T)> = rooms
            .iter()
            .enumerate()
            .map(|(i, room)| (layout.assignment_var(x, i), T::from_int(room.capacity as i64)))
            .collect();
        for (b, &w) in layout.slack_weights.iter().enumerate() {
            terms.push((layout.slack_var(x, b), -T::from_int(w as i64)));
        }
        let r = T::from_int(req.beds as i64);
        // (Σ c_k v_k - R)² with v_k² = v_k.
        for (k, &(vk, ck)) in terms.iter().enumerate() {
            model.add_linear(vk, lambda * (ck * ck - T::two() * r * ck));
            for &(vl, cl) in &terms[k + 1..] {
                model.add_quadratic(vk, vl, lambda * T::two() * ck * cl);
            }
        }
        model.add_offset(lambda * r * r);

        for (i, room) in rooms.iter().enumerate() {
            let gain = weights.reward * T::from_int(room.capacity as i64) / r;
            model.add_linear(layout.assignment_var(x, i), -gain);
        }
    }

    for (x, a) in requests.iter().enumerate() {
        for (y, b) in requests.iter().enumerate().skip(x + 1) {
            if !a.overlaps(b) {
                continue;
            }
            for i in 0..rooms.len() {
                model.add_quadratic(layout.assignment_var(x, i), layout.assignment_var(y, i), lambda);
            }
        }
    }
    model.prune();
    Ok(FullProblemQubo { model, ..layout })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{all_states, Vartype};
    use num_rational::Rational64;

    #[test]
    fn slack_ranges_are_exact() {
        assert!(slack_weights(1).is_empty());
        assert_eq!(slack_weights(2), vec![1]);
        assert_eq!(slack_weights(3), vec![1, 1]);
        assert_eq!(slack_weights(4), vec![1, 2]);
        assert_eq!(slack_weights(5), vec![1, 2, 1]);
        assert_eq!(slack_weights(8), vec![1, 2, 4]);
        for s in 1..40u32 {
            let w = slack_weights(s);
            assert_eq!(w.iter().sum::<u32>(), s - 1);
            // Every value in [0, s-1] is representable.
            let mut reach = vec![false; s as usize];
            for mask in 0u32..1 << w.len() {
                let v: u32 = w.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &x)| x).sum();
                reach[v as usize] = true;
            }
            assert!(reach.iter().all(|&r| r));
        }
    }

    #[test]
    fn empty_request_set() {
        let rooms = [RoomSpec { id: 0, capacity: 4 }];
        let q = full_problem_qubo::<f64>(&[], &rooms, FullProblemWeights::default()).unwrap();
        assert_eq!(q.model.num_vars(), 0);
        assert_eq!(q.model.offset(), 0.0);
    }

    #[test]
    fn eight_bed_rooms_need_three_slack_bits() {
        let rooms = [RoomSpec { id: 0, capacity: 8 }, RoomSpec { id: 1, capacity: 2 }];
        let req = [BookingRequest { id: 0, beds: 5, start_day: 0, duration: 1 }];
        let q = full_problem_qubo::<f64>(&req, &rooms, FullProblemWeights::default()).unwrap();
        assert_eq!(q.slack_weights.len(), 3);
        assert_eq!(q.model.num_vars(), 2 + 3);
    }

    #[test]
    fn single_request_single_room_ground_state() {
        let rooms = [RoomSpec { id: 0, capacity: 4 }];
        let req = [BookingRequest { id: 0, beds: 3, start_day: 0, duration: 2 }];
        let q = full_problem_qubo::<Rational64>(&req, &rooms, FullProblemWeights::default()).unwrap();
        assert_eq!(q.model.num_vars(), 3);
        let mut best: Option<(Rational64, Vec<Vec<i8>>)> = None;
        for s in all_states(3, Vartype::Binary) {
            let e = q.model.energy(&s);
            match &mut best {
                Some((b, arg)) if e == *b => arg.push(s),
                Some((b, _)) if e > *b => {}
                _ => best = Some((e, vec![s])),
            }
        }
        let (_, arg) = best.unwrap();
        assert_eq!(arg.len(), 1);
        assert_eq!(q.decode_rooms(&arg[0]), vec![vec![0]]);
        assert_eq!(q.decode_slack(&arg[0]), vec![1]);
    }

    #[test]
    fn rejects_nonpositive_penalty() {
        let w = FullProblemWeights { penalty: 0.0, reward: 1.0 };
        assert!(full_problem_qubo::<f64>(&[], &[], w).is_err());
    }
}
