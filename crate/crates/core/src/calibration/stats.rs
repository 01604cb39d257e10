use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Vartype;
use crate::solvers::SampleSet;

/// Joint frequencies `[p00, p01, p10, p11]` of bit pairs `(x_i, x_j)`, plus
/// single-bit inclusion frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStatistics {
    pub pairs: Vec<(usize, usize)>,
    pub probs: Vec<[f64; 4]>,
    /// Frequency of `x_i = 1` for every variable.
    pub inclusion: Vec<f64>,
}

/// Index into `[p00, p01, p10, p11]` for bits `(a, b)`.
pub fn cell(a: i8, b: i8) -> usize {
    (2 * a + b) as usize
}

impl PairStatistics {
    pub fn num_vars(&self) -> usize {
        self.inclusion.len()
    }

    /// Largest deviation of any pair's total from 1.
    pub fn normalization_error(&self) -> f64 {
        self.probs.iter().map(|p| (p.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[f64; 4]> {
        self.pairs.iter().position(|&p| p == (i, j)).map(|k| &self.probs[k])
    }

    /// Entrywise `self - reference` over identical pair lists.
    pub fn difference(&self, reference: &PairStatistics) -> Result<Vec<[f64; 4]>> {
        if self.pairs != reference.pairs {
            return Err(Error::argument("pair statistics cover different pairs"));
        }
        Ok(self
            .probs
            .iter()
            .zip(&reference.probs)
            .map(|(q, p)| [q[0] - p[0], q[1] - p[1], q[2] - p[2], q[3] - p[3]])
            .collect())
    }

    /// Mean of `|self - reference|` over every pair and cell.
    pub fn mean_abs_difference(&self, reference: &PairStatistics) -> Result<f64> {
        let d = self.difference(reference)?;
        let count = (d.len() * 4).max(1) as f64;
        Ok(d.iter().flatten().map(|x| x.abs()).sum::<f64>() / count)
    }

    /// Entrywise average of batches over the same pairs.
    pub fn average(batches: &[PairStatistics]) -> Result<PairStatistics> {
        let first = batches.first().ok_or_else(|| Error::argument("no statistics to average"))?;
        let mut out = first.clone();
        for b in &batches[1..] {
            if b.pairs != first.pairs || b.inclusion.len() != first.inclusion.len() {
                return Err(Error::argument("batches cover different pairs"));
            }
            for (o, p) in out.probs.iter_mut().zip(&b.probs) {
                for c in 0..4 {
                    o[c] += p[c];
                }
            }
            for (o, p) in out.inclusion.iter_mut().zip(&b.inclusion) {
                *o += p;
            }
        }
        let k = batches.len() as f64;
        out.probs.iter_mut().flatten().for_each(|x| *x /= k);
        out.inclusion.iter_mut().for_each(|x| *x /= k);
        Ok(out)
    }
}

/// Empirical pair frequencies of a sample set, counting multiplicities.
/// Spin samples are read as bits via `x = (s + 1) / 2`.
pub fn pairwise_stats(samples: &SampleSet<f64>, pairs: &[(usize, usize)]) -> Result<PairStatistics> {
    let total = samples.total_count();
    if total == 0 {
        return Err(Error::argument("pair statistics need at least one sample"));
    }
    let n = samples.num_vars();
    for &(i, j) in pairs {
        if i >= j || j >= n {
            return Err(Error::argument(format!("pair ({i}, {j}) is not canonical for {n} variables")));
        }
    }
    let bit = |v: i8| match samples.vartype() {
        Vartype::Binary => v,
        Vartype::Spin => (v + 1) / 2,
    };
    let mut probs = vec![[0.0; 4]; pairs.len()];
    let mut inclusion = vec![0.0; n];
    for s in samples.iter() {
        let w = s.count as f64 / total as f64;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            probs[k][cell(bit(s.state[i]), bit(s.state[j]))] += w;
        }
        for (inc, &v) in inclusion.iter_mut().zip(&s.state) {
            *inc += w * bit(v) as f64;
        }
    }
    Ok(PairStatistics { pairs: pairs.to_vec(), probs, inclusion })
}

/// All canonical pairs `i < j` over `n` variables.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}
