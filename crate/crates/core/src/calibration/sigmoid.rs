use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `b + (a - b)/2 · [tanh((V - V0)/w) + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidFit {
    /// Asymptote as `V → +∞`.
    pub a: f64,
    /// Asymptote as `V → -∞`.
    pub b: f64,
    pub v0: f64,
    pub w: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub fn sigmoid(v: f64, a: f64, b: f64, v0: f64, w: f64) -> f64 {
    b + 0.5 * (a - b) * (((v - v0) / w).tanh() + 1.0)
}

impl SigmoidFit {
    pub fn eval(&self, v: f64) -> f64 {
        sigmoid(v, self.a, self.b, self.v0, self.w)
    }
}

fn fail(reason: String) -> Error {
    Error::calibration(reason, Vec::new())
}

/// First `v` at which the piecewise-linear curve through the points reaches `level`.
fn crossing(points: &[(f64, f64)], level: f64, rising: bool) -> Option<f64> {
    points.windows(2).find_map(|p| {
        let ((v1, y1), (v2, y2)) = (p[0], p[1]);
        let (y1, y2, l) = if rising { (y1, y2, level) } else { (-y1, -y2, -level) };
        (y1 <= l && y2 >= l).then(|| if y2 == y1 { v1 } else { v1 + (l - y1) * (v2 - v1) / (y2 - y1) })
    })
}

fn sum_sq(points: &[(f64, f64)], p: &Vector4<f64>) -> f64 {
    points.iter().map(|&(v, y)| (sigmoid(v, p[0], p[1], p[2], p[3]) - y).powi(2)).sum()
}

/// Damped least-squares (Levenberg–Marquardt) fit of the sigmoid.
///
/// Starts from `a`, `b` at the mean of the two extreme probes on each side,
/// `V0` at the half-height crossing and `w` from the 25–75 % span, which is
/// `2 atanh(1/2) · w`.
pub fn fit_sigmoid(probes: &[f64], observed: &[f64]) -> Result<SigmoidFit> {
    if probes.len() != observed.len() || probes.len() < 5 {
        return Err(Error::argument("sigmoid fit needs at least five matching probe/observation pairs"));
    }
    if probes.iter().chain(observed).any(|x| !x.is_finite()) {
        return Err(Error::argument("sigmoid fit data must be finite"));
    }
    let mut points: Vec<(f64, f64)> = probes.iter().copied().zip(observed.iter().copied()).collect();
    points.sort_by(|p, q| p.0.total_cmp(&q.0));
    let m = points.len();
    let b0 = (points[0].1 + points[1].1) / 2.0;
    let a0 = (points[m - 1].1 + points[m - 2].1) / 2.0;
    let span = points[m - 1].0 - points[0].0;
    if (a0 - b0).abs() < 0.05 || span <= 0.0 {
        return Err(fail(format!("flat response: asymptotes {b0:.3} and {a0:.3} are indistinguishable")));
    }
    let rising = a0 > b0;
    let level = |f: f64| b0 + f * (a0 - b0);
    let v0 = crossing(&points, level(0.5), rising).ok_or_else(|| fail("no half-height crossing".into()))?;
    let w0 = match (crossing(&points, level(0.25), rising), crossing(&points, level(0.75), rising)) {
        (Some(lo), Some(hi)) if hi > lo => (hi - lo) / (2.0 * 0.5f64.atanh()),
        _ => span / 10.0,
    };

    let mut p = Vector4::new(a0, b0, v0, w0.max(span * 1e-3));
    let mut cost = sum_sq(&points, &p);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for &(v, y) in &points {
            let t = ((v - p[2]) / p[3]).tanh();
            let s = 1.0 - t * t;
            let half = 0.5 * (p[0] - p[1]);
            let j = Vector4::new(
                0.5 * (t + 1.0),
                0.5 * (1.0 - t),
                -half * s / p[3],
                -half * s * (v - p[2]) / (p[3] * p[3]),
            );
            let r = sigmoid(v, p[0], p[1], p[2], p[3]) - y;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = if trial[3] > 0.0 { sum_sq(&points, &trial) } else { f64::INFINITY };
            if trial_cost < cost {
                let rel = (cost - trial_cost) / cost.max(1e-300);
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = rel > 1e-12;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let fit = SigmoidFit { a: p[0], b: p[1], v0: p[2], w: p[3], residual: (cost / m as f64).sqrt() };
    if !(fit.w.is_finite() && fit.w > span * 1e-4 && fit.w < span * 10.0) {
        return Err(fail(format!("fitted width {} is degenerate", fit.w)));
    }
    if !fit.v0.is_finite() || (fit.a - fit.b).abs() < 0.05 {
        return Err(fail("fit collapsed to a flat response".into()));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_data_is_recovered() {
        let probes: Vec<f64> = (0..41).map(|k| -1.5 + k as f64 * 0.05).collect();
        let ys: Vec<f64> = probes.iter().map(|&v| sigmoid(v, 1.0, 0.2, -0.5, 0.15)).collect();
        let fit = fit_sigmoid(&probes, &ys).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-6 && (fit.b - 0.2).abs() < 1e-6);
        assert!((fit.v0 + 0.5).abs() < 1e-6 && (fit.w - 0.15).abs() < 1e-6);
        assert!(fit.residual < 1e-8);
    }

    #[test]
    fn flat_response_is_an_error() {
        let probes: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let ys = vec![0.4; 20];
        assert!(matches!(fit_sigmoid(&probes, &ys), Err(Error::Calibration { .. })));
    }

    #[test]
    fn falling_curves_fit_too() {
        let probes: Vec<f64> = (0..41).map(|k| -1.0 + k as f64 * 0.05).collect();
        let ys: Vec<f64> = probes.iter().map(|&v| sigmoid(v, 0.1, 0.9, 0.0, 0.2)).collect();
        let fit = fit_sigmoid(&probes, &ys).unwrap();
        assert!((fit.a - 0.1).abs() < 1e-6 && (fit.w - 0.2).abs() < 1e-6);
    }
}
