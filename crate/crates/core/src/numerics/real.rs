use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

type F = FBig<HalfEven, 2>;

/// Smallest mantissa any real value is allowed to carry.
pub const MIN_MANTISSA_BITS: usize = 64;
/// Mantissa used when nothing else is requested.
pub const DEFAULT_MANTISSA_BITS: usize = 256;

/// Binary floating point number with an explicit mantissa width.
///
/// Binary operations run at the wider of the two operand widths, so a result
/// never carries fewer bits than its inputs.
#[derive(Clone)]
pub struct PrecisionReal {
    v: F,
}

pub(crate) fn ibig_from_bigint(x: &BigInt) -> IBig {
    IBig::from_le_bytes(&x.to_signed_bytes_le())
}

pub(crate) fn bigint_from_ibig(x: &IBig) -> BigInt {
    BigInt::from_signed_bytes_le(&x.to_le_bytes())
}

impl PrecisionReal {
    fn wrap(v: F, bits: usize) -> Self {
        let bits = bits.max(MIN_MANTISSA_BITS);
        let v = if v.precision() == bits {
            v
        } else {
            v.with_precision(bits).value()
        };
        PrecisionReal { v }
    }

    pub fn zero(bits: usize) -> Self {
        Self::wrap(F::ZERO, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn from_i64(x: i64, bits: usize) -> Self {
        Self::wrap(F::from(x), bits)
    }

    pub fn from_i128(x: i128, bits: usize) -> Self {
        Self::wrap(F::from(x), bits)
    }

    pub fn from_bigint(x: &BigInt, bits: usize) -> Self {
        Self::wrap(F::from(ibig_from_bigint(x)), bits)
    }

    pub fn from_rational(x: &BigRational, bits: usize) -> Self {
        let num = Self::from_bigint(x.numer(), bits);
        let den = Self::from_bigint(x.denom(), bits);
        num / den
    }

    pub fn from_f64(x: f64, bits: usize) -> Result<Self> {
        let v = F::try_from(x).map_err(|_| Error::invalid("value", format!("non-finite float {x}")))?;
        Ok(Self::wrap(v, bits))
    }

    /// Value `m * 2^e` built from an integer significand and binary exponent.
    pub fn from_parts(m: &BigInt, e: isize, bits: usize) -> Self {
        Self::wrap(F::from_parts(ibig_from_bigint(m), e), bits)
    }

    pub fn mantissa_bits(&self) -> usize {
        self.v.precision()
    }

    /// Same value re-rounded to `bits` (never below the floor width).
    pub fn with_bits(&self, bits: usize) -> Self {
        Self::wrap(self.v.clone(), bits)
    }

    /// Same value carried at no fewer than `bits`.
    pub fn widen(&self, bits: usize) -> Self {
        if bits > self.mantissa_bits() {
            self.with_bits(bits)
        } else {
            self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.repr().is_zero()
    }

    pub fn signum(&self) -> i32 {
        let s = self.v.repr().significand();
        if s.is_zero() {
            0
        } else if *s < IBig::ZERO {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.signum() < 0 {
            return Err(Error::domain("sqrt of a negative value"));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        Ok(PrecisionReal { v: self.v.sqrt() })
    }

    pub fn ln(&self) -> Result<Self> {
        if self.signum() <= 0 {
            return Err(Error::domain("log of a non-positive value"));
        }
        Ok(PrecisionReal { v: self.v.ln() })
    }

    pub fn exp(&self) -> Self {
        PrecisionReal { v: self.v.exp() }
    }

    /// Exact dyadic decomposition `(m, e)` with value `m * 2^e`.
    pub fn to_parts(&self) -> (BigInt, isize) {
        let (m, e) = self.v.repr().clone().into_parts();
        (bigint_from_ibig(&m), e)
    }

    /// The stored binary value as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        let (m, e) = self.to_parts();
        if e >= 0 {
            BigRational::from_integer(m << (e as usize))
        } else {
            BigRational::new(m, BigInt::one() << ((-e) as usize))
        }
    }

    pub fn floor(&self) -> BigInt {
        let (m, e) = self.to_parts();
        if e >= 0 {
            m << (e as usize)
        } else {
            // arithmetic shift on BigInt rounds toward negative infinity
            m >> ((-e) as usize)
        }
    }

    /// Nearest integer with ties sent to the even neighbour.
    pub fn round_half_even(&self) -> BigInt {
        round_half_even_rational(&self.to_rational())
    }

    /// `floor(frac(x) * 2^128)`, exact.
    pub fn frac_fixed128(&self) -> u128 {
        let (m, e) = self.to_parts();
        let shift = e + 128;
        let scaled = if shift >= 0 { m << (shift as usize) } else { m >> ((-shift) as usize) };
        low_u128(&scaled)
    }

    pub fn to_f64(&self) -> f64 {
        self.v.to_f64().value()
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let d = self.v.clone().with_base_and_precision::<10>(digits.max(1)).value();
        format!("{d}")
    }

    /// Decimal digits that faithfully represent the mantissa.
    pub fn decimal_digits(&self) -> usize {
        (self.mantissa_bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one(self.mantissa_bits());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

/// Low 128 bits of `x` taken modulo `2^128` (two's complement for negatives).
pub(crate) fn low_u128(x: &BigInt) -> u128 {
    let modulus = BigInt::one() << 128usize;
    let r = ((x % &modulus) + &modulus) % &modulus;
    let (_, digits) = r.to_u64_digits();
    let lo = digits.first().copied().unwrap_or(0) as u128;
    let hi = digits.get(1).copied().unwrap_or(0) as u128;
    lo | (hi << 64)
}

/// Nearest integer to a rational, ties to even.
pub fn round_half_even_rational(x: &BigRational) -> BigInt {
    let fl = x.floor().to_integer();
    let diff = x - BigRational::from_integer(fl.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    match diff.cmp(&half) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if (&fl % 2u32).is_zero() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

/// `floor(frac(x) * 2^128)` for a rational, exact.
pub fn rational_frac_fixed128(x: &BigRational) -> u128 {
    let scaled = num_integer::Integer::div_floor(&(x.numer() << 128usize), x.denom());
    low_u128(&scaled)
}

impl PartialEq for PrecisionReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PrecisionReal {}

impl PartialOrd for PrecisionReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrecisionReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.v.repr().cmp(other.v.repr())
    }
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}b]", self.to_decimal_string(20), self.mantissa_bits())
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(self.decimal_digits()))
    }
}

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal { v: -self.v }
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal { v: -self.v.clone() }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: &PrecisionReal) -> PrecisionReal {
                let bits = self.mantissa_bits().max(rhs.mantissa_bits());
                PrecisionReal::wrap(&self.v $op &rhs.v, bits)
            }
        }
        impl $tr<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: &PrecisionReal) -> PrecisionReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: PrecisionReal) -> PrecisionReal {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

/// Natural log of a positive big integer at the requested width.
pub fn ln_bigint(x: &BigInt, bits: usize) -> Result<PrecisionReal> {
    if !x.is_positive() {
        return Err(Error::domain("log of a non-positive integer"));
    }
    PrecisionReal::from_bigint(x, bits).ln()
}
