use std::collections::BTreeMap;

use rand::Rng;

use super::QuboModel;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Maximum Value Vertex Cover instance: pick vertices with no edge between
/// them, maximising the total value.
#[derive(Debug, Clone, PartialEq)]
pub struct MvvcProblem<T> {
    pub graph: Graph,
    pub values: Vec<T>,
}

impl<T: Scalar> MvvcProblem<T> {
    pub fn new(graph: Graph, values: Vec<T>) -> Result<Self> {
        if values.len() != graph.num_vertices() {
            return Err(Error::argument(format!("{} values for {} vertices", values.len(), graph.num_vertices())));
        }
        if graph.num_vertices() == 0 {
            return Err(Error::argument("MVVC graph has no vertices"));
        }
        Ok(Self { graph, values })
    }

    /// Total value of a selection, ignoring constraint violations.
    pub fn value_of(&self, selected: &[bool]) -> T {
        self.values.iter().zip(selected).filter(|(_, &s)| s).fold(T::zero(), |acc, (&v, _)| acc + v)
    }
}

/// `γ Σ_{<i,j>} x_i x_j - Σ_i E_i x_i`.
pub fn mvvc_qubo<T: Scalar>(problem: &MvvcProblem<T>, edge_penalty: T) -> QuboModel<T> {
    let mut q = QuboModel::new(problem.graph.num_vertices());
    for (i, &e) in problem.values.iter().enumerate() {
        q.add_linear(i, -e);
    }
    for &(i, j) in problem.graph.edges() {
        q.add_quadratic(i, j, edge_penalty);
    }
    q
}

/// `E_i = (D_i + randInt(-3, 3)) / D_max` with the integer drawn uniformly.
pub fn random_values<T: Scalar, R: Rng + ?Sized>(
    graph: &Graph,
    max_duration: u32,
    durations: &[u32],
    rng: &mut R,
) -> Result<Vec<T>> {
    if max_duration == 0 {
        return Err(Error::argument("max duration must be positive"));
    }
    if durations.len() != graph.num_vertices() {
        return Err(Error::argument("one duration per vertex required"));
    }
    Ok(durations.iter().map(|&d| duration_value(d, max_duration, rng.random_range(-3..=3))).collect())
}

/// `(duration + jitter) / max_duration`.
pub fn duration_value<T: Scalar>(duration: u32, max_duration: u32, jitter: i64) -> T {
    T::from_int(duration as i64 + jitter) / T::from_int(max_duration as i64)
}

/// Directed weights `w_ij` over the edges of a graph, normalised per source vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights<T> {
    weights: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> EdgeWeights<T> {
    pub fn from_map(weights: BTreeMap<(usize, usize), T>) -> Self {
        Self { weights }
    }

    /// `w_ij = 1 / O_i` for every neighbour `j` of `i`.
    pub fn inverse_degree(graph: &Graph) -> Self {
        let mut weights = BTreeMap::new();
        for i in 0..graph.num_vertices() {
            let deg = graph.degree(i);
            if deg == 0 {
                continue;
            }
            let w = T::one() / T::from_int(deg as i64);
            for &j in graph.neighbors(i) {
                weights.insert((i, j), w);
            }
        }
        Self { weights }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.weights.get(&(i, j)).copied().unwrap_or_else(T::zero)
    }

    /// Every weight must sit on an edge and each non-isolated vertex's outgoing
    /// weights must sum to one.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        for &(i, j) in self.weights.keys() {
            if !graph.has_edge(i, j) {
                return Err(Error::argument(format!("weight on non-edge ({i},{j})")));
            }
        }
        for i in 0..graph.num_vertices() {
            if graph.degree(i) == 0 {
                continue;
            }
            let sum = graph.neighbors(i).iter().fold(T::zero(), |acc, &j| acc + self.get(i, j));
            if !sum.approx_eq(T::one()) {
                return Err(Error::argument(format!("weights of vertex {i} sum to {sum}, expected 1")));
            }
        }
        Ok(())
    }
}

/// Rewrites the value terms of an [`mvvc_qubo`] model as
/// `-Σ_{<i,j>} w_ij E_i x_i (1 - x_j)`.
///
/// On independent sets the energy is unchanged; a broken edge loses the value
/// credit of both endpoints, so large values cannot pay for violations.
/// Isolated vertices keep their plain `-E_i x_i` term.
pub fn redistribute_values<T: Scalar>(
    qubo: &QuboModel<T>,
    graph: &Graph,
    weights: &EdgeWeights<T>,
) -> Result<QuboModel<T>> {
    if qubo.num_vars() != graph.num_vertices() {
        return Err(Error::argument("model and graph sizes differ"));
    }
    weights.validate(graph)?;
    let mut out = qubo.clone();
    for i in 0..graph.num_vertices() {
        if graph.degree(i) == 0 {
            continue;
        }
        // The linear part -Σ_j w_ij E_i x_i collapses back to -E_i x_i.
        let value = -qubo.linear_at(i);
        for &j in graph.neighbors(i) {
            out.add_quadratic(i, j, weights.get(i, j) * value);
        }
    }
    Ok(out)
}
