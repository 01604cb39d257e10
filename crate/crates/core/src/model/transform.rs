use super::{IsingModel, QuboModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Substitutes `x_i = (s_i + 1) / 2`. Energies agree state by state.
pub fn qubo_to_ising<T: Scalar>(qubo: &QuboModel<T>) -> IsingModel<T> {
    let two = T::two();
    let four = two * two;
    let mut ising = IsingModel::new(qubo.num_vars());
    ising.add_offset(qubo.offset());
    for (i, &c) in qubo.linear().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        ising.add_linear(i, c / two);
        ising.add_offset(c / two);
    }
    for (&(i, j), &c) in qubo.quadratic() {
        let q = c / four;
        ising.add_quadratic(i, j, q);
        ising.add_linear(i, q);
        ising.add_linear(j, q);
        ising.add_offset(q);
    }
    ising
}

/// Substitutes `s_i = 2 x_i - 1`. Inverse of [`qubo_to_ising`].
pub fn ising_to_qubo<T: Scalar>(ising: &IsingModel<T>) -> QuboModel<T> {
    let two = T::two();
    let four = two * two;
    let mut qubo = QuboModel::new(ising.num_vars());
    qubo.add_offset(ising.offset());
    for (i, &h) in ising.linear().iter().enumerate() {
        qubo.add_linear(i, two * h);
        qubo.add_offset(-h);
    }
    for (&(i, j), &c) in ising.quadratic() {
        qubo.add_quadratic(i, j, four * c);
        qubo.add_linear(i, -two * c);
        qubo.add_linear(j, -two * c);
        qubo.add_offset(c);
    }
    qubo
}

/// Ising model carrying the indices of its auxiliary (XOR) spins.
#[derive(Debug, Clone, PartialEq)]
pub struct XorIsing<T> {
    pub model: IsingModel<T>,
    /// Auxiliary spins, always the highest indices of the model.
    pub aux: Vec<usize>,
}

impl<T: Scalar> XorIsing<T> {
    /// Number of problem (non-auxiliary) spins.
    pub fn num_logical(&self) -> usize {
        self.model.num_vars() - self.aux.len()
    }

    /// Recovers the logical spins when all auxiliary spins agree: the problem
    /// spins multiplied by the common auxiliary value. `None` if they disagree.
    pub fn decode(&self, state: &[i8]) -> Option<Vec<i8>> {
        let n = self.num_logical();
        let x = *self.aux.first().map(|&a| &state[a]).unwrap_or(&1);
        if self.aux.iter().any(|&a| state[a] != x) {
            return None;
        }
        Some(state[..n].iter().map(|&s| s * x).collect())
    }

    /// Decodes by majority vote over the auxiliary spins (ties count as `+1`).
    pub fn decode_majority(&self, state: &[i8]) -> Vec<i8> {
        let n = self.num_logical();
        let vote: i32 = self.aux.iter().map(|&a| state[a] as i32).sum();
        let x = if vote >= 0 { 1 } else { -1 };
        state[..n].iter().map(|&s| s * x).collect()
    }
}

/// Moves every field `h_i` onto a coupling between spin `i` and a new auxiliary
/// spin `X` (index `n`). States `(σ, +1)` and `(-σ, -1)` both carry the energy of `σ`.
pub fn eliminate_linear_terms<T: Scalar>(ising: &IsingModel<T>) -> XorIsing<T> {
    let n = ising.num_vars();
    let mut out = IsingModel::new(n + 1);
    out.add_offset(ising.offset());
    for (&(i, j), &c) in ising.quadratic() {
        out.add_quadratic(i, j, c);
    }
    for (i, &h) in ising.linear().iter().enumerate() {
        out.add_quadratic(i, n, h);
    }
    out.prune();
    XorIsing { model: out, aux: vec![n] }
}

/// Replaces the single auxiliary spin with `m` spins `X_1..X_m`, each taking
/// `1/m` of every auxiliary coupling, tied together by `-J X_k X_l` for each
/// pair with `J (m - 1) = 1`. The pair energy of the aligned sector is returned
/// to the offset, so aligned states reproduce the unsplit energies exactly.
pub fn split_aux_spin<T: Scalar>(xor: &XorIsing<T>, m: usize) -> Result<XorIsing<T>> {
    if m < 1 {
        return Err(Error::argument("auxiliary split count must be at least 1"));
    }
    if xor.aux.len() != 1 {
        return Err(Error::argument(format!("expected exactly one auxiliary spin, found {}", xor.aux.len())));
    }
    if m == 1 {
        return Ok(xor.clone());
    }
    let aux = xor.aux[0];
    let n = xor.model.num_vars() - 1;
    debug_assert_eq!(aux, n);
    let mt = T::from_int(m as i64);
    let mut out = IsingModel::new(n + m);
    out.add_offset(xor.model.offset());
    for i in 0..n {
        out.add_linear(i, xor.model.linear_at(i));
    }
    for (&(i, j), &c) in xor.model.quadratic() {
        if j == aux {
            for k in 0..m {
                out.add_quadratic(i, n + k, c / mt);
            }
        } else {
            out.add_quadratic(i, j, c);
        }
    }
    let h_aux = xor.model.linear_at(aux);
    if !h_aux.is_zero() {
        for k in 0..m {
            out.add_linear(n + k, h_aux / mt);
        }
    }
    let j = T::one() / T::from_int(m as i64 - 1);
    for k in 0..m {
        for l in k + 1..m {
            out.add_quadratic(n + k, n + l, -j);
            out.add_offset(j);
        }
    }
    Ok(XorIsing { model: out, aux: (n..n + m).collect() })
}
