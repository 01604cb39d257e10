//! Numeric abstraction shared by the quadratic models and their transforms.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Coefficient type of a quadratic model.
///
/// Floating point types compare energies with an absolute tolerance;
/// `Rational64` compares exactly, which is what the spectrum and
/// redistribution identities are checked with.
pub trait Scalar:
    NumAssign + Signed + Copy + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance under which two energies are considered equal.
    fn tolerance() -> Self;

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::tolerance()
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar type")
    }

    /// Lossy conversion used when handing a model to a floating point sampler.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for Rational64 {
    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }

    fn approx_eq(self, other: Self) -> bool {
        self == other
    }
}

/// Minimum of two partially ordered values; `a` wins ties.
pub(crate) fn pmin<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_exact() {
        let third = Rational64::new(1, 3);
        assert!((third + third + third).approx_eq(Rational64::from_integer(1)));
        assert!(!Rational64::new(1, 3).approx_eq(Rational64::new(333_333_333, 1_000_000_000)));
    }

    #[test]
    fn float_tolerance() {
        assert!(0.1f64.approx_eq(0.1 + 1e-12));
        assert!(!1.0f64.approx_eq(1.0 + 1e-6));
        assert_eq!(f64::from_int(-3), -3.0);
    }
}
