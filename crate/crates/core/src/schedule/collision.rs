use crate::demand::BookingRequest;
use crate::graph::Graph;

/// Overlap graph of booking requests: vertex `k` is `ids[k]`, and an edge
/// joins two requests that share at least one occupied date.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionGraph {
    pub ids: Vec<usize>,
    pub graph: Graph,
}

impl CollisionGraph {
    /// Neighbour count `O_i` of vertex `k`.
    pub fn degree(&self, k: usize) -> usize {
        self.graph.degree(k)
    }
}

pub fn build_collision_graph(requests: &[BookingRequest]) -> CollisionGraph {
    let mut edges = Vec::new();
    for (a, ra) in requests.iter().enumerate() {
        for (b, rb) in requests.iter().enumerate().skip(a + 1) {
            if ra.overlaps(rb) {
                edges.push((a, b));
            }
        }
    }
    let graph = Graph::new(requests.len(), edges).expect("overlap edges are valid");
    CollisionGraph { ids: requests.iter().map(|r| r.id).collect(), graph }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(id: usize, start_day: u32, duration: u32) -> BookingRequest {
        BookingRequest { id, beds: 1, start_day, duration }
    }

    #[test]
    fn half_open_intervals() {
        let g = build_collision_graph(&[req(0, 0, 3), req(1, 2, 2), req(2, 4, 2)]);
        assert!(g.graph.has_edge(0, 1));
        assert!(!g.graph.has_edge(1, 2));
        assert!(!g.graph.has_edge(0, 2));
    }

    #[test]
    fn chain_is_a_path() {
        let reqs: Vec<_> = (0..6).map(|k| req(k, 2 * k as u32, 3)).collect();
        let g = build_collision_graph(&reqs);
        assert_eq!(g.graph.num_edges(), 5);
        assert_eq!(g.graph.max_degree(), 2);
        assert_eq!(g.degree(0), 1);
    }
}
