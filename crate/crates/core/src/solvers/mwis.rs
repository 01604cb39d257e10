//! Solvers for the maximum value vertex cover subproblem: pick a set of
//! mutually non-adjacent vertices of largest total value.

use std::collections::HashMap;

use super::{postprocess, sa_sample_qubo, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{mvvc_qubo, redistribute_values, EdgeWeights, MvvcProblem};

/// Anything that turns an MVVC instance into an independent vertex selection.
pub trait MvvcSolver: Send + Sync {
    fn solve(&self, problem: &MvvcProblem<f64>) -> Result<Vec<bool>>;
}

/// Total value of a selection.
pub fn selection_value(problem: &MvvcProblem<f64>, selected: &[bool]) -> f64 {
    problem.values.iter().zip(selected).filter(|(_, &s)| s).map(|(v, _)| v).sum()
}

/// Exact solver by memoised search over remaining candidate sets.
///
/// Branches on the lowest-index candidate. Among optimal selections the one
/// that includes the lowest indices is returned. Interval-overlap graphs
/// listed in start order keep the number of distinct candidate sets
/// polynomial.
#[derive(Debug, Clone)]
pub struct ExactMvvc {
    /// Memo size at which the search gives up with a capacity error.
    pub max_states: usize,
}

impl Default for ExactMvvc {
    fn default() -> Self {
        Self { max_states: 2_000_000 }
    }
}

type Bits = Box<[u64]>;

struct Memo<'a> {
    graph: &'a Graph,
    values: &'a [f64],
    neighbor_masks: Vec<Bits>,
    table: HashMap<Bits, f64>,
    limit: usize,
}

fn lowest(bits: &[u64]) -> Option<usize> {
    bits.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

fn without(bits: &[u64], v: usize) -> Bits {
    let mut b: Bits = bits.into();
    b[v / 64] &= !(1u64 << (v % 64));
    b
}

impl Memo<'_> {
    fn branches(&mut self, cands: &[u64], v: usize) -> Result<(f64, f64)> {
        let exclude = self.best(&without(cands, v))?;
        let rest: Bits = cands.iter().zip(self.neighbor_masks[v].iter()).map(|(c, n)| c & !n).collect();
        let include = self.values[v] + self.best(&without(&rest, v))?;
        Ok((include, exclude))
    }

    fn best(&mut self, cands: &[u64]) -> Result<f64> {
        let Some(v) = lowest(cands) else {
            return Ok(0.0);
        };
        if let Some(&b) = self.table.get(cands) {
            return Ok(b);
        }
        let (inc, exc) = self.branches(cands, v)?;
        let b = inc.max(exc);
        if self.table.len() >= self.limit {
            return Err(Error::Capacity(format!(
                "exact MVVC search exceeded {} states on {} vertices",
                self.limit,
                self.graph.num_vertices()
            )));
        }
        self.table.insert(cands.into(), b);
        Ok(b)
    }
}

impl MvvcSolver for ExactMvvc {
    fn solve(&self, problem: &MvvcProblem<f64>) -> Result<Vec<bool>> {
        let g = &problem.graph;
        let n = g.num_vertices();
        let words = n.div_ceil(64).max(1);
        let mask_of = |vs: &mut dyn Iterator<Item = usize>| {
            let mut b = vec![0u64; words].into_boxed_slice();
            for v in vs {
                b[v / 64] |= 1 << (v % 64);
            }
            b
        };
        // Vertices without positive value never help.
        let mut cands = mask_of(&mut (0..n).filter(|&v| problem.values[v] > 0.0));
        let mut memo = Memo {
            graph: g,
            values: &problem.values,
            neighbor_masks: (0..n).map(|v| mask_of(&mut g.neighbors(v).iter().copied())).collect(),
            table: HashMap::new(),
            limit: self.max_states,
        };
        let tol = 1e-9 * (1.0 + problem.values.iter().map(|v| v.abs()).sum::<f64>());
        let mut selected = vec![false; n];
        while let Some(v) = lowest(&cands) {
            let (inc, exc) = memo.branches(&cands, v)?;
            if inc >= exc - tol {
                selected[v] = true;
                let rest: Bits = cands.iter().zip(memo.neighbor_masks[v].iter()).map(|(c, m)| c & !m).collect();
                cands = without(&rest, v);
            } else {
                cands = without(&cands, v);
            }
        }
        Ok(selected)
    }
}

/// Heuristic solver: anneals the redistributed MVVC QUBO, polishes every
/// draw by steepest descent and keeps the best feasible selection.
#[derive(Debug, Clone, Default)]
pub struct AnnealedMvvc {
    pub config: SolverConfig,
}

/// Makes a selection independent by dropping the lower-valued end of each
/// conflict, then adds any positive vertex that still fits, lowest index first.
pub fn repair_selection(problem: &MvvcProblem<f64>, selected: &mut [bool]) {
    let g = &problem.graph;
    for &(a, b) in g.edges() {
        if selected[a] && selected[b] {
            let drop = if problem.values[a] < problem.values[b] { a } else { b };
            selected[drop] = false;
        }
    }
    for v in 0..g.num_vertices() {
        if !selected[v] && problem.values[v] > 0.0 && g.neighbors(v).iter().all(|&u| !selected[u]) {
            selected[v] = true;
        }
    }
}

impl MvvcSolver for AnnealedMvvc {
    fn solve(&self, problem: &MvvcProblem<f64>) -> Result<Vec<bool>> {
        let n = problem.graph.num_vertices();
        let scale = problem.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if n == 0 || scale == 0.0 {
            return Ok(vec![false; n]);
        }
        // Values are normalised so the unit edge penalty dominates.
        let normalized = MvvcProblem::new(problem.graph.clone(), problem.values.iter().map(|v| v / scale).collect())?;
        let plain = mvvc_qubo(&normalized, 1.0);
        let qubo = redistribute_values(&plain, &problem.graph, &EdgeWeights::inverse_degree(&problem.graph))?;
        let samples = postprocess(&qubo, &sa_sample_qubo(&qubo, &self.config)?);
        let mut best: Option<(f64, Vec<bool>)> = None;
        for s in samples.iter() {
            let mut sel: Vec<bool> = s.state.iter().map(|&b| b == 1).collect();
            repair_selection(problem, &mut sel);
            let v = selection_value(problem, &sel);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, sel));
            }
        }
        Ok(best.map(|(_, s)| s).unwrap_or_else(|| vec![false; n]))
    }
}
