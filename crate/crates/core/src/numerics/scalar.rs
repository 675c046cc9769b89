use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::real::{rational_frac_fixed128, round_half_even_rational, PrecisionReal};
use crate::error::{Error, Result};

/// A real number held either exactly (rational) or as a binary float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Real(PrecisionReal),
}

impl Scalar {
    pub fn int(x: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_bigint(x: BigInt) -> Self {
        Scalar::Exact(BigRational::from_integer(x))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Real(_) => None,
        }
    }

    /// Integer value, when the scalar is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Exact(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Mantissa width of a float scalar; `None` for exact values.
    pub fn bits(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Real(x) => Some(x.mantissa_bits()),
        }
    }

    pub fn to_real(&self, bits: usize) -> PrecisionReal {
        match self {
            Scalar::Exact(r) => PrecisionReal::from_rational(r, bits),
            Scalar::Real(x) => x.widen(bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Real(x) => x.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Real(x) => x.is_zero(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Real(x) => x.signum(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Real(x) => Scalar::Real(x.abs()),
        }
    }

    /// Nearest integer, ties to even.
    pub fn round_half_even(&self) -> BigInt {
        match self {
            Scalar::Exact(r) => round_half_even_rational(r),
            Scalar::Real(x) => x.round_half_even(),
        }
    }

    pub fn frac_fixed128(&self) -> u128 {
        match self {
            Scalar::Exact(r) => rational_frac_fixed128(r),
            Scalar::Real(x) => x.frac_fixed128(),
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(&self) -> Scalar {
        let n = self.round_half_even();
        (self - &Scalar::from_bigint(n)).abs()
    }

    pub fn ln(&self, bits: usize) -> Result<PrecisionReal> {
        self.to_real(bits).ln()
    }

    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let bits = self.bits().unwrap_or(0).max(other.bits().unwrap_or(0));
                self.to_real(bits).cmp(&other.to_real(bits))
            }
        }
    }

    /// Decimal rendering; exact values render as `p/q` or an integer.
    pub fn render(&self) -> String {
        match self {
            Scalar::Exact(r) if r.is_integer() => r.to_integer().to_string(),
            Scalar::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Real(x) => x.to_string(),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    PrecisionReal::from_rational(r, 64).to_f64()
}

fn promote(a: &Scalar, b: &Scalar) -> (PrecisionReal, PrecisionReal) {
    let bits = a.bits().unwrap_or(0).max(b.bits().unwrap_or(0));
    (a.to_real(bits), b.to_real(bits))
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => {
                        let (a, b) = promote(self, rhs);
                        Scalar::Real(a $op b)
                    }
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Scalar {
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => {
                let (a, b) = promote(self, rhs);
                Scalar::Real(a / b)
            }
        })
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A Diophantine exponent value; exact relations give `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Exponent::Finite(x) => Some(*x),
            Exponent::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(x) => *x,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &Exponent) -> Ordering {
        self.to_f64().total_cmp(&other.to_f64())
    }

    pub fn render(&self) -> String {
        match self {
            Exponent::Finite(x) => format!("{x}"),
            Exponent::Infinite => "inf".to_string(),
        }
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(x) => s.serialize_f64(*x),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

/// A real stored as sign and natural log of its magnitude.
///
/// Products become sums of logs, which keeps tiny witness errors and huge
/// flow scalings comparable without overflow.
#[derive(Clone, Debug)]
pub struct LogValue {
    zero: bool,
    negative: bool,
    log_magnitude: PrecisionReal,
}

impl LogValue {
    pub fn zero(bits: usize) -> Self {
        LogValue { zero: true, negative: false, log_magnitude: PrecisionReal::zero(bits) }
    }

    pub fn from_log(log_magnitude: PrecisionReal, negative: bool) -> Self {
        LogValue { zero: false, negative, log_magnitude }
    }

    pub fn from_real(x: &PrecisionReal) -> Self {
        if x.is_zero() {
            return Self::zero(x.mantissa_bits());
        }
        let lm = x.abs().ln().expect("nonzero magnitude has a log");
        LogValue { zero: false, negative: x.signum() < 0, log_magnitude: lm }
    }

    pub fn from_scalar(x: &Scalar, bits: usize) -> Self {
        match x {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    return Self::zero(bits);
                }
                let n = PrecisionReal::from_bigint(&r.numer().abs(), bits).ln().expect("positive");
                let d = PrecisionReal::from_bigint(r.denom(), bits).ln().expect("positive");
                LogValue { zero: false, negative: r.is_negative(), log_magnitude: n - d }
            }
            Scalar::Real(v) => Self::from_real(&v.widen(bits)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_negative(&self) -> bool {
        !self.zero && self.negative
    }

    /// Natural log of the magnitude; `None` for zero.
    pub fn log_magnitude(&self) -> Option<&PrecisionReal> {
        if self.zero {
            None
        } else {
            Some(&self.log_magnitude)
        }
    }

    /// Log of the magnitude as `f64`, `-inf` for zero.
    pub fn log_f64(&self) -> f64 {
        if self.zero {
            f64::NEG_INFINITY
        } else {
            self.log_magnitude.to_f64()
        }
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        if self.zero || other.zero {
            return Self::zero(self.log_magnitude.mantissa_bits());
        }
        LogValue {
            zero: false,
            negative: self.negative != other.negative,
            log_magnitude: &self.log_magnitude + &other.log_magnitude,
        }
    }

    /// Multiply by `e^s`.
    pub fn scale_exp(&self, s: &PrecisionReal) -> LogValue {
        if self.zero {
            return self.clone();
        }
        LogValue { zero: false, negative: self.negative, log_magnitude: &self.log_magnitude + s }
    }

    pub fn abs(&self) -> LogValue {
        LogValue { negative: false, ..self.clone() }
    }

    pub fn to_real(&self) -> PrecisionReal {
        if self.zero {
            return PrecisionReal::zero(self.log_magnitude.mantissa_bits());
        }
        let m = self.log_magnitude.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.zero {
            return 0.0;
        }
        let m = self.log_magnitude.to_f64().exp();
        if self.negative {
            -m
        } else {
            m
        }
    }

    /// Compare magnitudes.
    pub fn cmp_abs(&self, other: &LogValue) -> Ordering {
        match (self.zero, other.zero) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.log_magnitude.cmp(&other.log_magnitude),
        }
    }

    /// `|self| <= e^bound * e^tol`, the log-domain form of an inequality.
    pub fn abs_le_exp(&self, bound: &PrecisionReal, tol: f64) -> bool {
        if self.zero {
            return true;
        }
        let slack = PrecisionReal::from_f64(tol, 64).expect("finite tolerance");
        self.log_magnitude <= bound + &slack
    }
}

impl serde::Serialize for LogValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogValue", 3)?;
        st.serialize_field("zero", &self.zero)?;
        st.serialize_field("negative", &self.is_negative())?;
        if self.zero {
            st.serialize_field("log_magnitude", &Option::<String>::None)?;
        } else {
            st.serialize_field("log_magnitude", &self.log_magnitude.to_decimal_string(20))?;
        }
        st.end()
    }
}


impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}
