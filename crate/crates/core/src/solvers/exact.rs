use crate::error::{Error, Result};
use crate::model::{all_states, Domain, QuadraticModel, Vartype};
use crate::scalar::{pmin, Scalar};

/// Largest model handed to plain enumeration.
pub const ENUMERATION_LIMIT: usize = 16;
/// Largest model accepted by [`exact_solve`].
pub const BRANCH_AND_BOUND_LIMIT: usize = 60;
/// Upper bound on the number of degenerate minima reported.
pub const MAX_MINIMA: usize = 1 << 20;

/// All global minima of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution<T> {
    pub energy: T,
    /// Every minimum-energy state, in lexicographic order.
    pub states: Vec<Vec<i8>>,
}

/// Finds every global minimum: enumeration up to [`ENUMERATION_LIMIT`]
/// variables, branch and bound up to [`BRANCH_AND_BOUND_LIMIT`].
pub fn exact_solve<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>) -> Result<ExactSolution<T>> {
    let n = model.num_vars();
    if n > BRANCH_AND_BOUND_LIMIT {
        return Err(Error::Capacity(format!(
            "{n} variables exceeds the exact solver limit of {BRANCH_AND_BOUND_LIMIT}"
        )));
    }
    if n <= ENUMERATION_LIMIT {
        Ok(enumerate_minima(model))
    } else {
        branch_and_bound(model)
    }
}

/// Collection window wider than the final tolerance so that floating point
/// drift in incremental energies cannot drop a true minimum.
fn window<T: Scalar>() -> T {
    T::tolerance() * T::from_int(1000)
}

fn finalize<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>, candidates: Vec<Vec<i8>>) -> ExactSolution<T> {
    let scored: Vec<(T, Vec<i8>)> = candidates.into_iter().map(|s| (model.energy(&s), s)).collect();
    let best = scored.iter().map(|(e, _)| *e).fold(None, |acc: Option<T>, e| Some(acc.map_or(e, |a| pmin(a, e))));
    let Some(best) = best else {
        return ExactSolution { energy: model.offset(), states: vec![Vec::new()] };
    };
    let mut states: Vec<Vec<i8>> = scored.into_iter().filter(|(e, _)| e.approx_eq(best)).map(|(_, s)| s).collect();
    states.sort();
    states.dedup();
    ExactSolution { energy: best, states }
}

/// Exhaustive Gray-code enumeration.
pub fn enumerate_minima<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>) -> ExactSolution<T> {
    let n = model.num_vars();
    if n == 0 {
        return ExactSolution { energy: model.offset(), states: vec![Vec::new()] };
    }
    assert!(n < 40, "enumeration of {n} variables is not feasible");
    let adj = model.adjacency();
    let lo = D::VARTYPE.values()[0];
    let mut state = vec![lo; n];
    let mut energy = model.energy(&state);
    let mut best = energy;
    let mut candidates = vec![state.clone()];
    let win = window::<T>();
    for k in 1u64..1 << n {
        let bit = k.trailing_zeros() as usize;
        energy += model.flip_delta(&adj, &state, bit);
        state[bit] = D::VARTYPE.flip(state[bit]);
        if energy < best {
            best = energy;
            candidates.retain(|s| model.energy(s) <= best + win);
        }
        if energy <= best + win {
            candidates.push(state.clone());
        }
    }
    finalize(model, candidates)
}

struct Search<'a, T, D> {
    model: &'a QuadraticModel<T, D>,
    adj: Vec<Vec<(usize, T)>>,
    /// `pair_floor[k]`: lowest possible energy of couplings among variables `k..n`.
    pair_floor: Vec<T>,
    best: T,
    candidates: Vec<Vec<i8>>,
    overflow: bool,
}

fn value_floor<T: Scalar>(vartype: Vartype, c: T) -> T {
    match vartype {
        Vartype::Binary => pmin(T::zero(), c),
        Vartype::Spin => -c.abs(),
    }
}

impl<T: Scalar, D: Domain> Search<'_, T, D> {
    fn dfs(&mut self, k: usize, state: &mut Vec<i8>, fixed: T, field: &[T]) {
        if self.overflow {
            return;
        }
        let n = state.len();
        let win = window::<T>();
        if k == n {
            if fixed < self.best {
                self.best = fixed;
                let (model, best) = (self.model, self.best);
                self.candidates.retain(|s| model.energy(s) <= best + win);
            }
            if fixed <= self.best + win {
                if self.candidates.len() >= MAX_MINIMA {
                    self.overflow = true;
                    return;
                }
                self.candidates.push(state.clone());
            }
            return;
        }
        let bound = field[k..].iter().fold(fixed + self.pair_floor[k], |acc, &f| acc + value_floor(D::VARTYPE, f));
        if bound > self.best + win {
            return;
        }
        let [a, b] = D::VARTYPE.values();
        let ea = fixed + times(field[k], a);
        let eb = fixed + times(field[k], b);
        let order = if eb < ea { [(b, eb), (a, ea)] } else { [(a, ea), (b, eb)] };
        for (v, e) in order {
            state[k] = v;
            let mut next = field.to_vec();
            for &(j, c) in &self.adj[k] {
                if j > k {
                    next[j] += times(c, v);
                }
            }
            self.dfs(k + 1, state, e, &next);
        }
    }
}

fn times<T: Scalar>(c: T, v: i8) -> T {
    match v {
        0 => T::zero(),
        1 => c,
        _ => -c,
    }
}

/// Depth-first branch and bound over variables in index order. The bound adds
/// to the fixed energy the most negative value each remaining linear field and
/// each remaining coupling could contribute.
pub fn branch_and_bound<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>) -> Result<ExactSolution<T>> {
    let n = model.num_vars();
    if n == 0 {
        return Ok(ExactSolution { energy: model.offset(), states: vec![Vec::new()] });
    }
    let mut pair_floor = vec![T::zero(); n + 1];
    let mut by_low = vec![T::zero(); n];
    for (&(i, _), &c) in model.quadratic() {
        by_low[i] += value_floor(D::VARTYPE, c);
    }
    for k in (0..n).rev() {
        pair_floor[k] = pair_floor[k + 1] + by_low[k];
    }
    // Seed the incumbent with a steepest-descent state for early pruning.
    let seed = super::steepest_descent(model, &vec![D::VARTYPE.values()[0]; n]);
    let mut search = Search {
        model,
        adj: model.adjacency(),
        pair_floor,
        best: model.energy(&seed),
        candidates: Vec::new(),
        overflow: false,
    };
    let mut state = vec![D::VARTYPE.values()[0]; n];
    search.dfs(0, &mut state, model.offset(), model.linear());
    if search.overflow {
        return Err(Error::Capacity(format!("more than {MAX_MINIMA} degenerate minima")));
    }
    Ok(finalize(model, search.candidates))
}

/// Reference minimum by plain enumeration; used to cross-check the solvers.
pub fn brute_force_minimum<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>) -> T {
    all_states(model.num_vars(), D::VARTYPE)
        .map(|s| model.energy(&s))
        .fold(None, |acc: Option<T>, e| Some(acc.map_or(e, |a| pmin(a, e))))
        .unwrap_or_else(|| model.offset())
}
