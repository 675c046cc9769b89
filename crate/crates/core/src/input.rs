//! Point and coefficient literals.
//!
//! A value is one of: a decimal (`0.718`, `1e-3`), a fraction (`22/7`),
//! `tau:R` or `tau:R:K` (the prescribed-exponent real for `R` with `K`
//! certified convergents, default 8), `phi`, or `sqrt:k`. Points are
//! comma-separated values.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use serde::Serialize;

use crate::constructions::{build_prescribed, BuildOptions, PrescribedNumber};
use crate::error::{Error, Result};
use crate::numerics::{golden_ratio, parse_rational, sqrt_int, Exponent, RealVector, Scalar};

/// Default depth of `tau:R` literals.
pub const DEFAULT_TAU_DEPTH: usize = 8;

/// Where a value came from.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Literal {
    Rational { value: String },
    Prescribed { tau: String, depth: usize },
    GoldenRatio,
    Sqrt { k: i64 },
}

/// A parsed value together with its simultaneous exponent when known.
#[derive(Clone, Debug)]
pub struct ParsedValue {
    pub literal: Literal,
    pub value: Scalar,
    /// `sigma` of the scalar: infinite for rationals, `tau` for prescribed
    /// reals, `1` for quadratic irrationals.
    pub sigma: Exponent,
    pub construction: Option<PrescribedNumber>,
}

impl ParsedValue {
    pub fn rational(r: BigRational) -> Self {
        ParsedValue {
            literal: Literal::Rational { value: r.to_string() },
            value: Scalar::Exact(r),
            sigma: Exponent::Infinite,
            construction: None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.value.is_exact()
    }
}

/// Parse one value; `bits` sets the width of `phi` and `sqrt:k`.
pub fn parse_value(s: &str, bits: usize) -> Result<ParsedValue> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("tau:") {
        let (tau, depth) = match rest.split_once(':') {
            Some((a, d)) => (a, d.parse::<usize>().map_err(|_| Error::invalid("tau depth", format!("`{d}` is not a count")))?),
            None => (rest, DEFAULT_TAU_DEPTH),
        };
        let tau_r = parse_rational(tau)?;
        let opts = BuildOptions { mantissa_bits: bits, ..BuildOptions::default() };
        let x = build_prescribed(&Scalar::Exact(tau_r.clone()), depth, &opts)?;
        return Ok(ParsedValue {
            literal: Literal::Prescribed { tau: tau_r.to_string(), depth },
            value: x.scalar(),
            sigma: Exponent::Finite(crate::numerics::rational_to_f64(&tau_r)),
            construction: Some(x),
        });
    }
    if t == "phi" {
        return Ok(ParsedValue {
            literal: Literal::GoldenRatio,
            value: Scalar::Real(golden_ratio(bits)),
            sigma: Exponent::Finite(1.0),
            construction: None,
        });
    }
    if let Some(k) = t.strip_prefix("sqrt:") {
        let k: i64 = k.parse().map_err(|_| Error::invalid("sqrt", format!("`{k}` is not an integer")))?;
        if k < 0 {
            return Err(Error::invalid("sqrt", "argument must be non-negative"));
        }
        let r = (k as u64).sqrt();
        if r * r == k as u64 {
            let mut v = ParsedValue::rational(BigRational::from_integer(BigInt::from(r)));
            v.literal = Literal::Sqrt { k };
            return Ok(v);
        }
        return Ok(ParsedValue {
            literal: Literal::Sqrt { k },
            value: Scalar::Real(sqrt_int(k, bits)?),
            sigma: Exponent::Finite(1.0),
            construction: None,
        });
    }
    Ok(ParsedValue::rational(parse_rational(t)?))
}

/// Parse a comma-separated point.
pub fn parse_point(s: &str, bits: usize) -> Result<Vec<ParsedValue>> {
    if s.trim().is_empty() {
        return Err(Error::invalid("point", "no coordinates"));
    }
    s.split(',').map(|c| parse_value(c, bits)).collect()
}

pub fn to_vector(values: &[ParsedValue]) -> RealVector {
    RealVector(values.iter().map(|v| v.value.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let p = parse_point("415/93, 0.25", 128).unwrap();
        assert!(p.iter().all(ParsedValue::is_rational));
        assert!(p[0].value.cmp_value(&Scalar::ratio(415, 93)).is_eq());
        let t = parse_value("tau:3", 128).unwrap();
        assert_eq!(t.sigma, Exponent::Finite(3.0));
        assert_eq!(t.construction.as_ref().unwrap().cf.convergents[4].1, BigInt::from(731));
        let phi = parse_value("phi", 128).unwrap();
        assert!((phi.value.to_f64() - 1.618033988749895).abs() < 1e-15);
        assert!(parse_value("sqrt:9", 128).unwrap().is_rational());
        assert_eq!(parse_value("sqrt:2", 128).unwrap().sigma, Exponent::Finite(1.0));
        assert!(parse_value("tau:3:2", 128).unwrap().value.bits().is_some());
        for bad in ["", "tau:", "sqrt:-1", "abc", "1/0", "tau:3:x"] {
            assert!(parse_value(bad, 128).is_err(), "{bad}");
        }
    }
}
