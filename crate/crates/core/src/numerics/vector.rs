use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::real::PrecisionReal;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Integer vector with arbitrary-size entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn from_i64(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    /// First nonzero entry is positive.
    pub fn is_lex_positive(&self) -> bool {
        self.0.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
    }

    pub fn sup_norm(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn euclid_norm_sq(&self) -> BigInt {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn euclid_norm(&self, bits: usize) -> PrecisionReal {
        PrecisionReal::from_bigint(&self.euclid_norm_sq(), bits).sqrt().expect("non-negative")
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|x| i64::try_from(x).ok()).collect()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for IntVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        parts.serialize(s)
    }
}

/// Real vector; each coordinate is exact or a float.
#[derive(Clone, Debug)]
pub struct RealVector(pub Vec<Scalar>);

impl RealVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(|x| x.is_exact())
    }

    /// Widest mantissa carried by any float coordinate.
    pub fn bits(&self) -> Option<usize> {
        self.0.iter().filter_map(|x| x.bits()).max()
    }

    pub fn dot(&self, q: &IntVector) -> Result<Scalar> {
        if q.dim() != self.dim() {
            return Err(Error::invalid("q", format!("dimension {} does not match point dimension {}", q.dim(), self.dim())));
        }
        let mut acc = Scalar::int(0);
        for (qi, yi) in q.0.iter().zip(&self.0) {
            if qi.is_zero() {
                continue;
            }
            acc = &acc + &(&Scalar::from_bigint(qi.clone()) * yi);
        }
        Ok(acc)
    }

    pub fn sup_norm(&self) -> Scalar {
        let mut best = Scalar::int(0);
        for x in &self.0 {
            let a = x.abs();
            if a.cmp_value(&best).is_gt() {
                best = a;
            }
        }
        best
    }

    pub fn euclid_norm(&self, bits: usize) -> PrecisionReal {
        let mut acc = PrecisionReal::zero(bits);
        for x in &self.0 {
            let r = x.to_real(bits);
            acc = &acc + &(&r * &r);
        }
        acc.sqrt().expect("non-negative")
    }

    pub fn render(&self) -> Vec<String> {
        self.0.iter().map(|x| x.render()).collect()
    }
}

/// `max(1, |x|)`.
pub fn plus_abs(x: &Scalar) -> Scalar {
    let a = x.abs();
    if a.cmp_value(&Scalar::int(1)).is_lt() {
        Scalar::int(1)
    } else {
        a
    }
}

/// `max(1, |x|)` for an integer.
pub fn plus_abs_int(x: &BigInt) -> BigInt {
    let a = x.abs();
    if a < BigInt::one() {
        BigInt::one()
    } else {
        a
    }
}

/// Product of `max(1, |v_i|)` over the coordinates of an integer vector.
pub fn pi_plus_int(v: &IntVector) -> BigInt {
    v.0.iter().map(plus_abs_int).product()
}

/// Product of `max(1, |v_i|)` over the coordinates of a real vector.
pub fn pi_plus(v: &RealVector) -> Scalar {
    v.0.iter().fold(Scalar::int(1), |acc, x| &acc * &plus_abs(x))
}
