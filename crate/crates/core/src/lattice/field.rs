use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::numerics::{rational_to_f64, round_half_even_rational, PrecisionReal};

/// Ordered field used by reduction and enumeration.
///
/// Implemented for exact rationals and for [`PrecisionReal`]; the latter
/// carries its width through `like`.
pub trait Field: Clone + Debug + PartialOrd + Send + Sync {
    fn from_int(x: i128, like: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_bigint(x: &BigInt, like: &Self) -> Self;
    /// Nearest integer, ties to even.
    fn round(&self) -> BigInt;
}

impl Field for BigRational {
    fn from_int(x: i128, _like: &Self) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_bigint(x: &BigInt, _like: &Self) -> Self {
        BigRational::from_integer(x.clone())
    }
    fn round(&self) -> BigInt {
        round_half_even_rational(self)
    }
}

impl Field for PrecisionReal {
    fn from_int(x: i128, like: &Self) -> Self {
        PrecisionReal::from_i128(x, like.mantissa_bits())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        PrecisionReal::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        PrecisionReal::to_f64(self)
    }
    fn from_bigint(x: &BigInt, like: &Self) -> Self {
        PrecisionReal::from_bigint(x, like.mantissa_bits())
    }
    fn round(&self) -> BigInt {
        self.round_half_even()
    }
}
