//! Evaluation scalars: the symbolic layer stores exact rational coefficients,
//! and evaluation is generic over the target scalar so the same code path
//! serves fast double-precision evaluation and the exact rational cross-check.

use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use std::ops::{Add, Mul};

/// A scalar type polynomials and vector fields can be evaluated in.
pub trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    fn from_rational(r: &BigRational) -> Self;

    /// Integer power; `None` signals a pole (zero base, negative exponent).
    fn powi(base: &Self, exp: i32) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or_else(|| {
            let n = r.numer().to_f64().unwrap_or(f64::NAN);
            let d = r.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn powi(base: &Self, exp: i32) -> Option<Self> {
        if exp < 0 && *base == 0.0 {
            None
        } else {
            Some(base.powi(exp))
        }
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn powi(base: &Self, exp: i32) -> Option<Self> {
        if exp < 0 && base.is_zero() {
            None
        } else {
            Some(Pow::pow(base.clone(), exp as i64))
        }
    }
}
