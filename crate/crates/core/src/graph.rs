//! Simple undirected graphs used for collision graphs and MVVC instances.

use rand::Rng;

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n` with a canonical edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, canonicalising edges to `i < j` and dropping duplicates.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::argument(format!("self-loop on vertex {a}")));
            }
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::argument(format!("edge ({a},{b}) out of range for {num_vertices} vertices")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        canon.dedup();
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(a, b) in &canon {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { num_vertices, edges: canon, adjacency })
    }

    pub fn empty(num_vertices: usize) -> Self {
        Self { num_vertices, edges: Vec::new(), adjacency: vec![Vec::new(); num_vertices] }
    }

    /// Erdős–Rényi graph `G(n, p)`.
    pub fn random<R: Rng + ?Sized>(num_vertices: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for i in 0..num_vertices {
            for j in i + 1..num_vertices {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Self::new(num_vertices, edges).expect("generated edges are valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Number of neighbours, `O_i`.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a).is_some_and(|n| n.binary_search(&b).is_ok())
    }

    /// True if no edge has both endpoints selected.
    pub fn is_independent(&self, selected: &[bool]) -> bool {
        self.edges.iter().all(|&(a, b)| !(selected[a] && selected[b]))
    }

    /// Number of edges with both endpoints selected.
    pub fn broken_edges(&self, selected: &[bool]) -> usize {
        self.edges.iter().filter(|&&(a, b)| selected[a] && selected[b]).count()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_vertices];
        let mut out = Vec::new();
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices`; vertex `k` of the result is `vertices[k]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.num_vertices];
        for (k, &v) in vertices.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]));
        Graph::new(vertices.len(), edges).expect("induced edges are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalises_and_dedups() {
        let g = Graph::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.degree(1), 2);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn rejects_self_loops_and_range() {
        assert!(Graph::new(2, [(1, 1)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn components_and_induced() {
        let g = Graph::new(5, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(!g.is_connected());
        let sub = g.induced(&[3, 4, 0]);
        assert_eq!(sub.edges(), &[(0, 1)]);
        assert!(g.is_independent(&[true, false, true, true, false]));
        assert_eq!(g.broken_edges(&[true, true, false, true, true]), 2);
    }
}
