//! Exact and arbitrary-precision scalars, log-domain values and vectors.

mod parse;
mod poly;
mod real;
mod scalar;
mod vector;

pub use parse::{parse_rational, parse_scalar};
pub use poly::{PolyMap, Polynomial};
pub use real::{
    ln_bigint, rational_frac_fixed128, round_half_even_rational, PrecisionReal, DEFAULT_MANTISSA_BITS,
    MIN_MANTISSA_BITS,
};
pub use scalar::{rational_to_f64, Exponent, LogValue, Scalar};
pub use vector::{pi_plus, pi_plus_int, plus_abs, plus_abs_int, IntVector, RealVector};

/// Golden ratio at the given width.
pub fn golden_ratio(bits: usize) -> PrecisionReal {
    let five = PrecisionReal::from_i64(5, bits);
    (five.sqrt().expect("positive") + PrecisionReal::one(bits)) / PrecisionReal::from_i64(2, bits)
}

/// Square root of a non-negative integer at the given width.
pub fn sqrt_int(k: i64, bits: usize) -> crate::error::Result<PrecisionReal> {
    PrecisionReal::from_i64(k, bits).sqrt()
}

/// Serialize through `Display`, for big integers in reports.
pub fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    x: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}
