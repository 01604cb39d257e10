//! Monte Carlo reference statistics over independent vertex sets ("covers").
//!
//! A trajectory grows a set one random vertex at a time, removing the chosen
//! vertex and its neighbours from the pool, and records every intermediate
//! set with an importance weight. With [`CoverWeighting::DivideOrderings`] the
//! weight is `∏ |pool_t| / k!` after `k` steps: each of the `k!` orderings of a
//! set is drawn with probability `∏ 1/|pool_t|`, so every independent set
//! accumulates expected weight one per trajectory and the weighted statistics
//! are uniform over sets. [`CoverWeighting::LiteralAlgorithm`] multiplies by
//! `k!` instead, as a literal reading of the update rule suggests; it
//! over-weights large sets and is kept only so the comparison can be rerun.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{all_pairs, cell, PairStatistics};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverWeighting {
    DivideOrderings,
    LiteralAlgorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub weighting: CoverWeighting,
    /// Count the empty set as a cover with weight one per trajectory.
    pub include_empty: bool,
    /// Pairs to report; `None` means every pair.
    pub pairs: Option<Vec<(usize, usize)>>,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { weighting: CoverWeighting::DivideOrderings, include_empty: false, pairs: None }
    }
}

/// Weighted statistics with delta-method standard errors of the ratio estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub stats: PairStatistics,
    pub stderr: Vec<[f64; 4]>,
    pub inclusion_stderr: Vec<f64>,
    pub trajectories: usize,
}

/// Running sums over trajectories for one statistic `A` against the total weight `B`.
#[derive(Debug, Clone, Default)]
struct Moments {
    a: Vec<f64>,
    aa: Vec<f64>,
    ab: Vec<f64>,
    b: f64,
    bb: f64,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self { a: vec![0.0; len], aa: vec![0.0; len], ab: vec![0.0; len], b: 0.0, bb: 0.0 }
    }

    fn push(&mut self, a: &[f64], b: f64) {
        for k in 0..a.len() {
            self.a[k] += a[k];
            self.aa[k] += a[k] * a[k];
            self.ab[k] += a[k] * b;
        }
        self.b += b;
        self.bb += b * b;
    }

    fn merge(mut self, other: Moments) -> Moments {
        for k in 0..self.a.len() {
            self.a[k] += other.a[k];
            self.aa[k] += other.aa[k];
            self.ab[k] += other.ab[k];
        }
        self.b += other.b;
        self.bb += other.bb;
        self
    }
}

const CHUNKS: u64 = 64;

pub fn mc_cover_sample<R: Rng + ?Sized>(
    graph: &Graph,
    trajectories: usize,
    options: &McOptions,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = graph.num_vertices();
    if n == 0 {
        return Err(Error::argument("cover sampling needs a nonempty graph"));
    }
    if trajectories < 1 {
        return Err(Error::argument("need at least one trajectory"));
    }
    let pairs = options.pairs.clone().unwrap_or_else(|| all_pairs(n));
    if pairs.iter().any(|&(i, j)| i >= j || j >= n) {
        return Err(Error::argument("pairs must be canonical and in range"));
    }
    let root = rng.next_u64();
    let entries = pairs.len() * 4 + n;
    let run_chunk = |chunk: u64| {
        let mut rng = seeds::rng(root, "mc-cover", chunk);
        let count = trajectories / CHUNKS as usize + usize::from((chunk as usize) < trajectories % CHUNKS as usize);
        let mut m = Moments::new(entries);
        let mut a = vec![0.0; entries];
        let mut pool = vec![true; n];
        let mut cover = vec![0i8; n];
        let mut members: Vec<usize> = Vec::with_capacity(n);
        for _ in 0..count {
            a.iter_mut().for_each(|x| *x = 0.0);
            pool.iter_mut().for_each(|p| *p = true);
            cover.iter_mut().for_each(|c| *c = 0);
            let mut b = 0.0;
            let record = |cover: &[i8], w: f64, a: &mut [f64]| {
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    a[4 * k + cell(cover[i], cover[j])] += w;
                }
                for (v, &c) in cover.iter().enumerate() {
                    if c == 1 {
                        a[4 * pairs.len() + v] += w;
                    }
                }
            };
            if options.include_empty {
                record(&cover, 1.0, &mut a);
                b += 1.0;
            }
            let mut weight = 1.0;
            let mut left = n;
            let mut k = 0usize;
            while left > 0 {
                members.clear();
                members.extend((0..n).filter(|&v| pool[v]));
                let v = members[rng.random_range(0..members.len())];
                k += 1;
                weight *= left as f64;
                weight = match options.weighting {
                    CoverWeighting::DivideOrderings => weight / k as f64,
                    CoverWeighting::LiteralAlgorithm => weight * k as f64,
                };
                cover[v] = 1;
                pool[v] = false;
                left -= 1;
                for &u in graph.neighbors(v) {
                    if pool[u] {
                        pool[u] = false;
                        left -= 1;
                    }
                }
                record(&cover, weight, &mut a);
                b += weight;
            }
            m.push(&a, b);
        }
        m
    };
    let total = (0..CHUNKS).into_par_iter().map(run_chunk).reduce(|| Moments::new(entries), Moments::merge);

    let s = trajectories as f64;
    let mean_b = total.b / s;
    let estimate = |k: usize| {
        let r = total.a[k] / total.b;
        let resid = total.aa[k] - 2.0 * r * total.ab[k] + r * r * total.bb;
        let se = if trajectories > 1 { (resid.max(0.0) / (s * (s - 1.0))).sqrt() / mean_b } else { f64::INFINITY };
        (r, se)
    };
    let mut probs = vec![[0.0; 4]; pairs.len()];
    let mut stderr = vec![[0.0; 4]; pairs.len()];
    for k in 0..pairs.len() {
        for c in 0..4 {
            (probs[k][c], stderr[k][c]) = estimate(4 * k + c);
        }
    }
    let (inclusion, inclusion_stderr) = (0..n).map(|v| estimate(4 * pairs.len() + v)).unzip();
    Ok(McEstimate { stats: PairStatistics { pairs, probs, inclusion }, stderr, inclusion_stderr, trajectories })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(g: &Graph, opts: &McOptions) -> McEstimate {
        mc_cover_sample(g, 100_000, opts, &mut seeds::rng(1, "mc-test", 0)).unwrap()
    }

    #[test]
    fn single_vertex() {
        let est = run(&Graph::empty(1), &McOptions::default());
        assert!(est.stats.pairs.is_empty());
        assert_eq!(est.stats.inclusion, vec![1.0]);
    }

    #[test]
    fn single_edge() {
        let est = run(&Graph::new(2, [(0, 1)]).unwrap(), &McOptions::default());
        let p = est.stats.probs[0];
        assert_eq!(p[0], 0.0);
        assert_eq!(p[3], 0.0);
        assert!((p[1] - 0.5).abs() < 3.0 * est.stderr[0][1]);
    }

    #[test]
    fn two_isolated_vertices() {
        let g = Graph::empty(2);
        let est = run(&g, &McOptions::default());
        for c in 1..4 {
            let (p, se) = (est.stats.probs[0][c], est.stderr[0][c]);
            // Cell 11 has zero variance: every trajectory ends at {0, 1} with weight 1.
            assert!((p - 1.0 / 3.0).abs() <= 3.0 * se + 1e-12, "cell {c}: {p} +- {se}");
        }
        assert!(est.stats.normalization_error() < 1e-9);
        // The literal weighting gives {u} weight 2 and {u, v} weight 4, so p11 = 2/3.
        let lit = run(&g, &McOptions { weighting: CoverWeighting::LiteralAlgorithm, ..Default::default() });
        assert!((lit.stats.probs[0][3] - 2.0 / 3.0).abs() < 1e-12);
        let with_empty = run(&g, &McOptions { include_empty: true, ..Default::default() });
        let (p00, se00) = (with_empty.stats.probs[0][0], with_empty.stderr[0][0]);
        assert!((p00 - 0.25).abs() <= 3.0 * se00 + 1e-12, "{p00} +- {se00}");
    }

    #[test]
    fn deterministic_under_seed() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(run(&g, &McOptions::default()).stats, run(&g, &McOptions::default()).stats);
    }
}
