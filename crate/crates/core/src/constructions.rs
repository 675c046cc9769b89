//! Continued fractions and reals with a prescribed simultaneous exponent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{LogValue, PrecisionReal, Scalar, DEFAULT_MANTISSA_BITS};
use crate::Exponent;

/// Largest convergent denominator a construction may store, as a bit length.
pub const MAX_DEPTH_BITS: u64 = 4096;
/// Default ceiling on the mantissa a construction may request.
pub const DEFAULT_MAX_MANTISSA_BITS: usize = 1 << 15;

/// Partial quotients with their convergents `p_k / q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
}

impl ContinuedFraction {
    pub fn from_quotients(quotients: Vec<BigInt>) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p_prev2, mut q_prev2) = (BigInt::zero(), BigInt::one());
        for a in &quotients {
            let p = a * &p_prev + &p_prev2;
            let q = a * &q_prev + &q_prev2;
            p_prev2 = std::mem::replace(&mut p_prev, p.clone());
            q_prev2 = std::mem::replace(&mut q_prev, q.clone());
            convergents.push((p, q));
        }
        ContinuedFraction { quotients, convergents }
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// Value of the last convergent.
    pub fn value(&self) -> Option<BigRational> {
        self.convergents.last().map(|(p, q)| BigRational::new(p.clone(), q.clone()))
    }

    /// `|q_k x - p_k|` for every convergent.
    pub fn errors(&self, x: &Scalar, bits: usize) -> Vec<LogValue> {
        self.convergents
            .iter()
            .map(|(p, q)| {
                let e = &(&Scalar::from_bigint(q.clone()) * x) - &Scalar::from_bigint(p.clone());
                LogValue::from_scalar(&e, bits)
            })
            .collect()
    }
}

/// Continued fraction of a non-negative rational, last quotient at least 2
/// unless the expansion is a single term.
pub fn cf_expand(x: &BigRational) -> Result<ContinuedFraction> {
    if x.is_negative() {
        return Err(Error::invalid("x", "continued fractions are expanded for non-negative rationals"));
    }
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut qs = Vec::new();
    while !d.is_zero() {
        let (a, r) = n.div_rem(&d);
        qs.push(a);
        n = std::mem::replace(&mut d, r);
    }
    if qs.len() > 1 && qs.last().is_some_and(|a| a.is_one()) {
        qs.pop();
        *qs.last_mut().expect("at least one quotient") += 1;
    }
    Ok(ContinuedFraction::from_quotients(qs))
}

/// Options for [`build_prescribed`].
#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub mantissa_bits: usize,
    pub max_mantissa_bits: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { mantissa_bits: DEFAULT_MANTISSA_BITS, max_mantissa_bits: DEFAULT_MAX_MANTISSA_BITS }
    }
}

/// A real built from the quotient rule `a_{k+1} = max(1, ceil(q_k^(tau-1)))`.
#[derive(Clone, Debug)]
pub struct PrescribedNumber {
    pub target_tau: Scalar,
    pub depth: usize,
    /// Quotients and convergents `0..=depth`.
    pub cf: ContinuedFraction,
    pub value: PrecisionReal,
}

/// `ceil(q^(tau-1))`, exact when `tau` is a rational with a small denominator.
fn next_quotient(q: &BigInt, tau: &Scalar) -> BigInt {
    let one = BigInt::one();
    if q <= &one {
        return one;
    }
    if let Scalar::Exact(t) = tau {
        let e = t - BigRational::one();
        let (r, s) = (e.numer().to_u32(), e.denom().to_u32());
        if let (Some(r), Some(s)) = (r, s) {
            if s <= 64 && (r as u64) * q.bits() <= 1 << 22 {
                if r == 0 {
                    return one;
                }
                let pow = num_traits::pow(q.clone(), r as usize);
                let root = pow.nth_root(s);
                let ceil = if num_traits::pow(root.clone(), s as usize) < pow { root + 1 } else { root };
                return ceil.max(one);
            }
        }
    }
    let bits = (q.bits() as usize) * 2 + 128;
    let t = tau.to_real(bits);
    let lnq = PrecisionReal::from_bigint(q, bits).ln().expect("q > 1");
    let v = ((t - PrecisionReal::one(bits)) * lnq).exp();
    let fl = v.floor();
    let ceil = if PrecisionReal::from_bigint(&fl, bits) < v { fl + 1 } else { fl };
    ceil.max(one)
}

/// Build the prescribed-exponent real for `tau >= 1` with `depth + 1`
/// certified convergents.
pub fn build_prescribed(tau: &Scalar, depth: usize, opts: &BuildOptions) -> Result<PrescribedNumber> {
    if tau.cmp_value(&Scalar::int(1)).is_lt() {
        return Err(Error::invalid("tau", format!("must be at least 1, got {tau}")));
    }
    if depth == 0 {
        return Err(Error::invalid("depth", "must be at least 1"));
    }
    let mut quotients = vec![BigInt::one()];
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let mut dens = vec![q.clone()];
    let push = |quotients: &mut Vec<BigInt>, dens: &mut Vec<BigInt>, q_prev: &mut BigInt, q: &mut BigInt| {
        let a = next_quotient(q, tau);
        let q_next = &a * &*q + &*q_prev;
        *q_prev = std::mem::replace(q, q_next.clone());
        quotients.push(a);
        dens.push(q_next);
    };
    while quotients.len() <= depth {
        push(&mut quotients, &mut dens, &mut q_prev, &mut q);
        if q.bits() > MAX_DEPTH_BITS + 1 {
            break;
        }
    }
    let q_depth = &dens[depth.min(dens.len() - 1)];
    if quotients.len() <= depth || q_depth.bits() > MAX_DEPTH_BITS {
        return Err(Error::invalid(
            "depth",
            format!("convergent denominators pass 2^{MAX_DEPTH_BITS} before depth {depth}"),
        ));
    }
    push(&mut quotients, &mut dens, &mut q_prev, &mut q);
    let needed = (dens[depth].bits() + dens[depth + 1].bits()) as usize + 16;
    if needed > opts.max_mantissa_bits {
        return Err(Error::PrecisionShortfall { needed, max: opts.max_mantissa_bits });
    }
    let bits = needed.max(opts.mantissa_bits);
    // extend until the tail error 1/(q_M q_{M+1}) is far below the mantissa
    loop {
        let m = dens.len() - 1;
        if (dens[m - 1].bits() + dens[m].bits()) as usize > bits + 8 {
            break;
        }
        push(&mut quotients, &mut dens, &mut q_prev, &mut q);
    }
    let full = ContinuedFraction::from_quotients(quotients);
    let (p_m, q_m) = full.convergents[full.len() - 2].clone();
    let value = PrecisionReal::from_rational(&BigRational::new(p_m, q_m), bits);
    let cf = ContinuedFraction {
        quotients: full.quotients[..=depth].to_vec(),
        convergents: full.convergents[..=depth].to_vec(),
    };
    Ok(PrescribedNumber { target_tau: tau.clone(), depth, cf, value })
}

/// Quality `-ln|q_k x - p_k| / ln q_k` at convergent `k`.
pub fn convergent_quality(cf: &ContinuedFraction, x: &Scalar, k: usize, bits: usize) -> Result<Exponent> {
    let (p, q) = cf.convergents.get(k).ok_or_else(|| Error::invalid("k", "convergent index out of range"))?;
    if q <= &BigInt::one() {
        return Err(Error::invalid("k", "convergent denominator must exceed 1"));
    }
    let e = &(&Scalar::from_bigint(q.clone()) * x) - &Scalar::from_bigint(p.clone());
    let lv = LogValue::from_scalar(&e, bits);
    match lv.log_magnitude() {
        None => Ok(Exponent::Infinite),
        Some(l) => {
            let lq = PrecisionReal::from_bigint(q, bits).ln()?;
            Ok(Exponent::Finite((-l.clone() / lq).to_f64()))
        }
    }
}

/// Exponent read off the deepest stored convergent of `x`.
pub fn measured_sigma(cf: &ContinuedFraction, x: &Scalar, bits: usize) -> Result<Exponent> {
    if cf.len() < 4 {
        return Err(Error::invalid("depth", "at least four convergents are needed"));
    }
    convergent_quality(cf, x, cf.len() - 1, bits)
}

impl PrescribedNumber {
    pub fn scalar(&self) -> Scalar {
        Scalar::Real(self.value.clone())
    }

    pub fn mantissa_bits(&self) -> usize {
        self.value.mantissa_bits()
    }

    pub fn measured_sigma(&self) -> Result<Exponent> {
        measured_sigma(&self.cf, &self.scalar(), self.mantissa_bits())
    }

    /// Quality at each stored convergent with `q_k > 1`.
    pub fn convergent_qualities(&self) -> Vec<(usize, Exponent)> {
        (0..self.cf.len())
            .filter(|&k| self.cf.convergents[k].1 > BigInt::one())
            .filter_map(|k| convergent_quality(&self.cf, &self.scalar(), k, self.mantissa_bits()).ok().map(|e| (k, e)))
            .collect()
    }

    pub fn report(&self) -> ConstructionReport {
        let x = self.scalar();
        let bits = self.mantissa_bits();
        let errors = self.cf.errors(&x, bits);
        let qualities: std::collections::BTreeMap<usize, Exponent> = self.convergent_qualities().into_iter().collect();
        let convergents = self
            .cf
            .convergents
            .iter()
            .enumerate()
            .map(|(k, (p, q))| ConvergentRow {
                k,
                quotient: self.cf.quotients[k].to_string(),
                p: p.to_string(),
                q: q.to_string(),
                q_bits: q.bits(),
                log_error: errors[k].log_f64(),
                quality: qualities.get(&k).copied(),
            })
            .collect();
        ConstructionReport {
            tau: self.target_tau.render(),
            depth: self.depth,
            mantissa_bits: bits,
            value: self.value.to_decimal_string(60),
            measured_sigma: self.measured_sigma().ok(),
            convergents,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergentRow {
    pub k: usize,
    pub quotient: String,
    pub p: String,
    pub q: String,
    pub q_bits: u64,
    pub log_error: f64,
    pub quality: Option<Exponent>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub tau: String,
    pub depth: usize,
    pub mantissa_bits: usize,
    pub value: String,
    pub measured_sigma: Option<Exponent>,
    pub convergents: Vec<ConvergentRow>,
}
