//! Numeric representation for measure data.
//!
//! Everything that only adds and multiplies masses is generic over [`Scalar`], so
//! the same oracle code runs on `f64` and on exact rationals. Entropies themselves
//! are always `f64` since `x ln x` leaves the rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive + Send + Sync + 'static {
    fn to_f64(&self) -> f64;

    /// Equality up to `tol` for floats; exact for rationals.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits in every scalar")
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}

impl Scalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// Exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn sum<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}
