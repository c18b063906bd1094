//! The coefficient scalar abstraction.
//!
//! Polynomial and counting code is written once against [`Scalar`] and runs
//! on machine integers, big integers, rationals or floats. Everything that
//! claims to be exact uses [`BigInt`](num_bigint::BigInt) or
//! [`BigRational`](num_rational::BigRational).

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

pub trait Scalar: Num + Clone + FromPrimitive + Debug {}

impl<T: Num + Clone + FromPrimitive + Debug> Scalar for T {}

pub(crate) fn from_i64<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("scalar type cannot represent an i64")
}

/// The generalized binomial coefficient `a(a-1)…(a-k+1)/k!`, valid for
/// negative `a`. Each partial product is itself a binomial coefficient, so
/// the division is exact in any integer type.
pub fn binomial<T: Scalar>(a: i64, k: usize) -> T {
    let mut acc = T::one();
    for j in 0..k as i64 {
        acc = acc * from_i64::<T>(a - j) / from_i64::<T>(j + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn pascal_values() {
        assert_eq!(binomial::<i64>(5, 2), 10);
        assert_eq!(binomial::<i64>(5, 0), 1);
        assert_eq!(binomial::<i64>(3, 5), 0);
        assert_eq!(binomial::<i64>(0, 0), 1);
        assert_eq!(binomial::<BigInt>(60, 30), "118264581564861424".parse().unwrap());
    }

    #[test]
    fn negative_upper_argument() {
        // C(-d, r) = (-1)^r C(d+r-1, r)
        for d in 1..6i64 {
            for r in 0..6usize {
                let sign = if r % 2 == 0 { 1 } else { -1 };
                assert_eq!(binomial::<i64>(-d, r), sign * binomial::<i64>(d + r as i64 - 1, r));
            }
        }
    }

    #[test]
    fn rational_and_float_agree_with_integer() {
        for a in -4..10i64 {
            for k in 0..7 {
                let exact: i64 = binomial(a, k);
                let q: BigRational = binomial(a, k);
                assert_eq!(q, BigRational::from_integer(exact.into()));
                let f: f64 = binomial(a, k);
                assert!((f - exact as f64).abs() < 1e-9);
            }
        }
    }
}
