use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Parse a decimal (`-1.25`, `3e-4`) or fraction (`22/7`) literal exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::invalid("number", "empty literal"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::invalid("number", format!("bad numerator in `{t}`")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::invalid("number", format!("bad denominator in `{t}`")))?;
        if d.is_zero() {
            return Err(Error::invalid("number", format!("zero denominator in `{t}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| Error::invalid("number", format!("bad exponent in `{t}`")))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::invalid("number", format!("no digits in `{t}`")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::invalid("number", format!("unexpected character in `{t}`")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().expect("digits only") };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(Error::invalid("number", format!("exponent out of range in `{t}`")));
    }
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u64))
    })
}

/// Parse an exact literal into a scalar. The `_bits` argument is accepted for
/// symmetry with float-producing parsers.
pub fn parse_scalar(s: &str, _bits: usize) -> Result<Scalar> {
    parse_rational(s).map(Scalar::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn literals() {
        assert_eq!(parse_rational("0.718").unwrap(), q(718, 1000));
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational("22/7").unwrap(), q(22, 7));
        assert_eq!(parse_rational("1.5e-2").unwrap(), q(3, 200));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("2E3").unwrap(), q(2000, 1));
    }

    #[test]
    fn malformed_literals_are_rejected() {
        for bad in ["", "abc", "1/0", "1.2.3", "-", "e5", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
