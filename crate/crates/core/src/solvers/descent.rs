use super::SampleSet;
use crate::model::{Domain, QuadraticModel};
use crate::scalar::Scalar;

/// Greedy single-flip descent: flips the variable with the most negative
/// energy change until none lowers the energy. Ties go to the lowest index.
pub fn steepest_descent<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>, state: &[i8]) -> Vec<i8> {
    let adj = model.adjacency();
    let mut s = state.to_vec();
    let threshold = -T::tolerance();
    loop {
        let mut best: Option<(usize, T)> = None;
        for k in 0..s.len() {
            let d = model.flip_delta(&adj, &s, k);
            if d < threshold && best.is_none_or(|(_, b)| d < b) {
                best = Some((k, d));
            }
        }
        match best {
            Some((k, _)) => s[k] = D::VARTYPE.flip(s[k]),
            None => return s,
        }
    }
}

/// Applies [`steepest_descent`] to every draw of a sample set.
pub fn postprocess<T: Scalar, D: Domain>(model: &QuadraticModel<T, D>, samples: &SampleSet<T>) -> SampleSet<T> {
    samples.map_states(model, |s| steepest_descent(model, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsingModel;

    #[test]
    fn ferromagnetic_pair_aligns() {
        let mut m = IsingModel::<f64>::new(2);
        m.add_quadratic(0, 1, -1.0);
        let out = steepest_descent(&m, &[1, -1]);
        assert_eq!(out[0], out[1]);
        // Equal gains: the lowest index flips.
        assert_eq!(out, vec![-1, -1]);
    }

    #[test]
    fn local_minimum_is_fixed() {
        let mut m = IsingModel::<f64>::new(2);
        m.add_linear(0, 1.0);
        m.add_linear(1, -1.0);
        assert_eq!(steepest_descent(&m, &[-1, 1]), vec![-1, 1]);
    }
}
