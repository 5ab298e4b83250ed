//! Exact scalar abstraction.
//!
//! Every decision in the solvers (argmax membership, strict dominance,
//! positivity of an optimal slack) is a sign test, so the scalar must be an
//! ordered field with exact arithmetic. Floating point types deliberately do
//! not satisfy [`Scalar`]: they are not `Ord`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact ordered field usable by every solver in this crate.
pub trait Scalar:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + Signed
    + num_traits::Num
    + for<'a> std::ops::AddAssign<&'a Self>
    + for<'a> std::ops::SubAssign<&'a Self>
    + 'static
{
    /// `numer / denom`; panics on a zero denominator.
    fn ratio(numer: i64, denom: i64) -> Self;

    fn to_big(&self) -> BigRational;

    /// Converts back from a big rational, `None` when the value does not fit.
    fn from_big(value: &BigRational) -> Option<Self>;

    fn int(value: i64) -> Self {
        Self::ratio(value, 1)
    }
}

impl Scalar for BigRational {
    fn ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_big(&self) -> BigRational {
        self.clone()
    }

    fn from_big(value: &BigRational) -> Option<Self> {
        Some(value.clone())
    }
}

macro_rules! fixed_width_ratio {
    ($int:ty, $to:ident) => {
        impl Scalar for Ratio<$int> {
            fn ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(numer as $int, denom as $int)
            }

            fn to_big(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big(value: &BigRational) -> Option<Self> {
                let numer = value.numer().$to()?;
                let denom = value.denom().$to()?;
                Some(Ratio::new(numer, denom))
            }
        }
    };
}

fixed_width_ratio!(i64, to_i64);
fixed_width_ratio!(i128, to_i128);

/// Sum of a slice of scalars.
pub fn sum<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    let mut acc = T::zero();
    for v in values {
        acc += v;
    }
    acc
}

/// True when every value is non-negative and the total is exactly one.
pub fn is_probability_vector<T: Scalar>(values: &[T]) -> bool {
    values.iter().all(|v| !v.is_negative()) && sum(values).is_one()
}

/// Parses an integer or `a/b` literal exactly.
pub fn parse_literal<T: Scalar>(text: &str) -> Option<T> {
    let text = text.trim();
    let big = match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(text.parse().ok()?),
    };
    T::from_big(&big)
}
