use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Domain, QuadraticModel, Vartype};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub state: Vec<i8>,
    pub energy: T,
    pub count: usize,
}

/// Multiset of configurations with their model energies.
///
/// Entries are unique states sorted by energy, then state, so two sets built
/// from the same draws compare equal regardless of draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    vartype: Vartype,
    num_vars: usize,
    samples: Vec<Sample<T>>,
}

impl<T: Scalar> SampleSet<T> {
    /// Aggregates raw states, evaluating each distinct state on `model`.
    pub fn from_states<D: Domain>(model: &QuadraticModel<T, D>, states: impl IntoIterator<Item = Vec<i8>>) -> Self {
        let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
        for s in states {
            *counts.entry(s).or_default() += 1;
        }
        Self::from_counts(model, counts)
    }

    pub fn from_counts<D: Domain>(model: &QuadraticModel<T, D>, counts: BTreeMap<Vec<i8>, usize>) -> Self {
        let mut samples: Vec<Sample<T>> = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(state, count)| Sample { energy: model.energy(&state), state, count })
            .collect();
        samples.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap().then_with(|| a.state.cmp(&b.state)));
        Self { vartype: D::VARTYPE, num_vars: model.num_vars(), samples }
    }

    /// Builds a set from stored records after re-checking energies against `model`.
    pub fn from_records<D: Domain>(model: &QuadraticModel<T, D>, records: Vec<Sample<T>>) -> Result<Self> {
        let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
        for r in records {
            model.check_state(&r.state)?;
            if r.count == 0 {
                return Err(Error::argument("sample count must be at least 1"));
            }
            let e = model.energy(&r.state);
            if !e.approx_eq(r.energy) {
                return Err(Error::argument(format!("stored energy {} differs from model energy {e}", r.energy)));
            }
            *counts.entry(r.state).or_default() += r.count;
        }
        Ok(Self::from_counts(model, counts))
    }

    pub fn vartype(&self) -> Vartype {
        self.vartype
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn samples(&self) -> &[Sample<T>] {
        &self.samples
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample<T>> {
        self.samples.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of draws, counting multiplicities.
    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.count).sum()
    }

    pub fn lowest(&self) -> Option<&Sample<T>> {
        self.samples.first()
    }

    pub fn mean_energy(&self) -> f64 {
        let n = self.total_count() as f64;
        self.samples.iter().map(|s| s.energy.to_f64_lossy() * s.count as f64).sum::<f64>() / n
    }

    /// Every draw as a separate state, in entry order.
    pub fn expanded_states(&self) -> impl Iterator<Item = &[i8]> {
        self.samples.iter().flat_map(|s| std::iter::repeat_n(s.state.as_slice(), s.count))
    }

    /// Re-evaluates every entry on `model` and reports the largest deviation.
    pub fn max_energy_drift<D: Domain>(&self, model: &QuadraticModel<T, D>) -> T {
        self.samples.iter().map(|s| (model.energy(&s.state) - s.energy).abs()).fold(T::zero(), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        })
    }

    /// Applies `f` to every draw and re-aggregates on `model`.
    pub fn map_states<D: Domain>(&self, model: &QuadraticModel<T, D>, mut f: impl FnMut(&[i8]) -> Vec<i8>) -> Self {
        let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
        for s in &self.samples {
            *counts.entry(f(&s.state)).or_default() += s.count;
        }
        Self::from_counts(model, counts)
    }

    /// Merges another set drawn from the same model.
    pub fn merge<D: Domain>(&self, other: &Self, model: &QuadraticModel<T, D>) -> Self {
        let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
        for s in self.samples.iter().chain(other.samples.iter()) {
            *counts.entry(s.state.clone()).or_default() += s.count;
        }
        Self::from_counts(model, counts)
    }
}

/// `q`-quantile of the sample energies, counting multiplicities, with lower
/// interpolation: the energy at sorted position `⌊q (N - 1)⌋`.
pub fn quantile_energy<T: Scalar>(samples: &SampleSet<T>, q: f64) -> Result<T> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::argument(format!("quantile {q} outside (0, 1]")));
    }
    let n = samples.total_count();
    if n == 0 {
        return Err(Error::argument("quantile of an empty sample set"));
    }
    let target = ((q * (n - 1) as f64).floor() as usize).min(n - 1);
    let mut seen = 0;
    for s in samples.iter() {
        seen += s.count;
        if seen > target {
            return Ok(s.energy);
        }
    }
    unreachable!("target index below total count")
}
