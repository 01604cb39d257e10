//! Binary (QUBO) and spin (Ising) quadratic models and their reformulations.
//!
//! Both model kinds share one storage type, [`QuadraticModel`], parameterised by
//! a coefficient [`Scalar`] and a variable domain marker. Variables are indexed
//! `0..num_vars`; quadratic keys are canonical `(i, j)` with `i < j`.

mod embed;
mod full;
pub mod io;
mod mvvc;
mod transform;

use std::collections::BTreeMap;
use std::marker::PhantomData;

pub use embed::{chain_strength, clique_embedding_estimate};
pub use full::{full_problem_qubo, FullProblemQubo, FullProblemWeights};
pub use mvvc::{duration_value, mvvc_qubo, random_values, redistribute_values, EdgeWeights, MvvcProblem};
pub use transform::{eliminate_linear_terms, ising_to_qubo, qubo_to_ising, split_aux_spin, XorIsing};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vartype {
    /// Variables take values in `{0, 1}`.
    Binary,
    /// Variables take values in `{-1, +1}`.
    Spin,
}

impl Vartype {
    pub fn values(self) -> [i8; 2] {
        match self {
            Vartype::Binary => [0, 1],
            Vartype::Spin => [-1, 1],
        }
    }

    /// The value a variable takes after flipping `v`.
    pub fn flip(self, v: i8) -> i8 {
        match self {
            Vartype::Binary => 1 - v,
            Vartype::Spin => -v,
        }
    }
}

/// Variable domain marker for [`QuadraticModel`].
pub trait Domain: Clone + Copy + std::fmt::Debug + Send + Sync + 'static {
    const VARTYPE: Vartype;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spin;

impl Domain for Binary {
    const VARTYPE: Vartype = Vartype::Binary;
}

impl Domain for Spin {
    const VARTYPE: Vartype = Vartype::Spin;
}

/// `energy(v) = offset + Σ linear_i v_i + Σ_{i<j} quadratic_ij v_i v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel<T, D> {
    linear: Vec<T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
    _domain: PhantomData<D>,
}

/// Binary model over `{0,1}^n`.
pub type QuboModel<T> = QuadraticModel<T, Binary>;
/// Spin model over `{-1,+1}^n`; `linear` holds the fields `h`, `quadratic` the couplings `J`.
pub type IsingModel<T> = QuadraticModel<T, Spin>;

impl<T: Scalar, D: Domain> QuadraticModel<T, D> {
    pub fn new(num_vars: usize) -> Self {
        Self { linear: vec![T::zero(); num_vars], quadratic: BTreeMap::new(), offset: T::zero(), _domain: PhantomData }
    }

    pub fn vartype(&self) -> Vartype {
        D::VARTYPE
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn linear_at(&self, i: usize) -> T {
        self.linear[i]
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), T> {
        &self.quadratic
    }

    pub fn quadratic_at(&self, i: usize, j: usize) -> T {
        let key = (i.min(j), i.max(j));
        self.quadratic.get(&key).copied().unwrap_or_else(T::zero)
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Grows the variable set to at least `n` variables.
    pub fn ensure_vars(&mut self, n: usize) {
        if n > self.linear.len() {
            self.linear.resize(n, T::zero());
        }
    }

    pub fn add_linear(&mut self, i: usize, c: T) {
        self.ensure_vars(i + 1);
        self.linear[i] += c;
    }

    /// Adds `c · v_i · v_j`. A diagonal term is reduced with `x² = x` or `s² = 1`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        self.ensure_vars(i.max(j) + 1);
        if i == j {
            match D::VARTYPE {
                Vartype::Binary => self.linear[i] += c,
                Vartype::Spin => self.offset += c,
            }
            return;
        }
        *self.quadratic.entry((i.min(j), i.max(j))).or_insert_with(T::zero) += c;
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset += c;
    }

    /// Adds every term of `other`, growing the variable set when needed.
    pub fn add_model(&mut self, other: &Self) {
        self.ensure_vars(other.num_vars());
        for (i, &c) in other.linear.iter().enumerate() {
            self.linear[i] += c;
        }
        for (&(i, j), &c) in &other.quadratic {
            self.add_quadratic(i, j, c);
        }
        self.offset += other.offset;
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            linear: self.linear.iter().map(|&c| c * factor).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, c * factor)).collect(),
            offset: self.offset * factor,
            _domain: PhantomData,
        }
    }

    /// Drops quadratic entries that are exactly zero.
    pub fn prune(&mut self) {
        self.quadratic.retain(|_, c| !c.is_zero());
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> QuadraticModel<U, D> {
        let conv = |c: T| U::from_f64(c.to_f64_lossy()).expect("finite coefficient");
        QuadraticModel {
            linear: self.linear.iter().map(|&c| conv(c)).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, conv(c))).collect(),
            offset: conv(self.offset),
            _domain: PhantomData,
        }
    }

    /// Checks that `state` has the right length and only domain values.
    pub fn check_state(&self, state: &[i8]) -> Result<()> {
        if state.len() != self.num_vars() {
            return Err(Error::argument(format!("state has {} variables, model has {}", state.len(), self.num_vars())));
        }
        let allowed = D::VARTYPE.values();
        if let Some(bad) = state.iter().find(|v| !allowed.contains(v)) {
            return Err(Error::argument(format!("value {bad} outside the {:?} domain", D::VARTYPE)));
        }
        Ok(())
    }

    /// Energy of `state`. Values are `0/1` for binary models and `±1` for spin models.
    pub fn energy(&self, state: &[i8]) -> T {
        debug_assert_eq!(state.len(), self.num_vars());
        let mut e = self.offset;
        for (c, &v) in self.linear.iter().zip(state) {
            e += times(*c, v);
        }
        for (&(i, j), &c) in &self.quadratic {
            e += times(c, state[i] * state[j]);
        }
        e
    }

    /// Neighbour lists `(j, coefficient)` for every variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for (&(i, j), &c) in &self.quadratic {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    /// Energy change from flipping variable `k` of `state`.
    pub fn flip_delta(&self, adjacency: &[Vec<(usize, T)>], state: &[i8], k: usize) -> T {
        let mut field = self.linear[k];
        for &(j, c) in &adjacency[k] {
            field += times(c, state[j]);
        }
        let new = D::VARTYPE.flip(state[k]);
        times(field, new - state[k])
    }

    /// Largest coefficient magnitude over linear and quadratic terms.
    pub fn max_abs_coefficient(&self) -> T {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .map(|c| c.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

#[inline]
fn times<T: Scalar>(c: T, v: i8) -> T {
    match v {
        0 => T::zero(),
        1 => c,
        -1 => -c,
        _ => c * T::from_int(v as i64),
    }
}

/// Iterates over every state of `n` variables of the given vartype.
pub fn all_states(n: usize, vartype: Vartype) -> impl Iterator<Item = Vec<i8>> {
    assert!(n < 63, "enumeration limited to fewer than 63 variables");
    let [lo, hi] = vartype.values();
    (0u64..1 << n).map(move |mask| (0..n).map(|k| if mask >> k & 1 == 1 { hi } else { lo }).collect())
}

/// Maps a spin state to bits (`+1 → 1`, `-1 → 0`).
pub fn spins_to_bits(state: &[i8]) -> Vec<i8> {
    state.iter().map(|&s| i8::from(s > 0)).collect()
}

/// Maps bits to spins (`1 → +1`, `0 → -1`).
pub fn bits_to_spins(state: &[i8]) -> Vec<i8> {
    state.iter().map(|&b| if b > 0 { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn energy_matches_definition() {
        let mut q = QuboModel::<f64>::new(3);
        q.add_linear(0, -1.0);
        q.add_quadratic(2, 0, 2.0);
        q.add_offset(0.5);
        assert_eq!(q.quadratic_at(0, 2), 2.0);
        assert_eq!(q.energy(&[1, 0, 1]), 0.5 - 1.0 + 2.0);
        assert_eq!(q.energy(&[0, 1, 0]), 0.5);
    }

    #[test]
    fn diagonal_reduction_depends_on_domain() {
        let mut q = QuboModel::<f64>::new(1);
        q.add_quadratic(0, 0, 3.0);
        assert_eq!(q.linear_at(0), 3.0);
        let mut s = IsingModel::<f64>::new(1);
        s.add_quadratic(0, 0, 3.0);
        assert_eq!(s.offset(), 3.0);
    }

    #[test]
    fn flip_delta_agrees_with_energy() {
        let mut m = IsingModel::<Rational64>::new(3);
        m.add_linear(0, Rational64::new(1, 2));
        m.add_quadratic(0, 1, Rational64::new(-3, 4));
        m.add_quadratic(1, 2, Rational64::new(1, 3));
        let adj = m.adjacency();
        for state in all_states(3, Vartype::Spin) {
            for k in 0..3 {
                let mut flipped = state.clone();
                flipped[k] = -flipped[k];
                assert_eq!(m.flip_delta(&adj, &state, k), m.energy(&flipped) - m.energy(&state));
            }
        }
    }

    #[test]
    fn check_state_rejects_wrong_domain() {
        let q = QuboModel::<f64>::new(2);
        assert!(q.check_state(&[0, 1]).is_ok());
        assert!(q.check_state(&[-1, 1]).is_err());
        assert!(q.check_state(&[0]).is_err());
    }
}
