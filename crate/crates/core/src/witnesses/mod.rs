//! Witness search for the standard, multiplicative and simultaneous exponents.
//!
//! * `omega`: `|<q,y> + p| < sup|q_i|^(-v)`, region `sup|q_i| <= q_max`.
//! * `omega_times`: `|<q,y> + p| < Pi_+(q)^(-v/n)`, region `Pi_+(q) <= q_max`.
//! * `sigma`: `max_i |q a_i + p_i| < q^(-v)`, region `1 <= q <= q_max`.
//!
//! Each estimate keeps the best witness of every dyadic height bin, the best
//! witness of a top height window, and exact re-evaluations of all of them.

mod engine;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::constructions::cf_expand;
use crate::error::{Error, Result};
use crate::numerics::{pi_plus_int, round_half_even_rational, IntVector, LogValue, PrecisionReal, RealVector, Scalar};
use crate::Exponent;
use engine::{search_linear, search_scalar, Cand, Fixed, Modular, Region, Ring, Tracker};

/// Which exponent an estimate targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Omega,
    OmegaTimes,
    Sigma,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Omega => "omega",
            Mode::OmegaTimes => "omega_times",
            Mode::Sigma => "sigma",
        }
    }
}

/// The integer companion of a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Companion {
    Scalar(BigInt),
    Vector(IntVector),
}

impl Serialize for Companion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Companion::Scalar(p) => p.to_string().serialize(s),
            Companion::Vector(v) => v.serialize(s),
        }
    }
}

/// An explicit approximation `(q, p)` with its exact error and quality.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub q: IntVector,
    pub p: Companion,
    pub error: LogValue,
    pub height: String,
    #[serde(skip)]
    pub height_int: BigInt,
    /// `None` when the height is 1 and no quality is defined.
    pub quality: Option<Exponent>,
}

impl Witness {
    /// Natural log of the error, `-inf` for an exact relation.
    pub fn log_error(&self) -> f64 {
        self.error.log_f64()
    }
}

/// Result of one exponent estimate.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentEstimate {
    pub mode: Mode,
    pub q_max: String,
    pub region: &'static str,
    pub method: &'static str,
    pub window: (String, String),
    pub raw_max: Exponent,
    pub window_estimate: Exponent,
    pub exact_hit: bool,
    pub candidates: u64,
    pub witnesses: Vec<Witness>,
}

/// Search limits.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Largest number of candidate vectors an enumeration may visit.
    pub budget: f64,
    /// Mantissa used for logarithms of exact errors.
    pub log_bits: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 2e10, log_bits: 128 }
    }
}

fn exact_coords(y: &RealVector) -> Vec<BigRational> {
    y.0.iter()
        .map(|c| match c {
            Scalar::Exact(r) => r.clone(),
            Scalar::Real(x) => x.to_rational(),
        })
        .collect()
}

/// Nearest companion `p = -round(<q,y>)` (ties to even) and the exact error
/// `|<q,y> + p|` of the stored coordinates.
pub fn best_companion(q: &IntVector, y: &RealVector) -> Result<(BigInt, LogValue)> {
    if q.dim() != y.dim() {
        return Err(Error::invalid("q", format!("dimension {} does not match point dimension {}", q.dim(), y.dim())));
    }
    let (p, e) = companion_exact(q, &exact_coords(y));
    Ok((p, LogValue::from_scalar(&Scalar::Exact(e), 128)))
}

fn companion_exact(q: &IntVector, ys: &[BigRational]) -> (BigInt, BigRational) {
    let mut s = BigRational::zero();
    for (qi, yi) in q.0.iter().zip(ys) {
        if !qi.is_zero() {
            s += yi * BigRational::from_integer(qi.clone());
        }
    }
    let p = -round_half_even_rational(&s);
    let e = (s + BigRational::from_integer(p.clone())).abs();
    (p, e)
}

fn quality_of(err: &LogValue, height: &BigInt, scale: f64, bits: usize) -> Option<Exponent> {
    if height <= &BigInt::one() {
        return None;
    }
    Some(match err.log_magnitude() {
        None => Exponent::Infinite,
        Some(l) => {
            let lh = PrecisionReal::from_bigint(height, bits).ln().expect("height > 1");
            Exponent::Finite(scale * (-l.clone() / lh).to_f64())
        }
    })
}

/// Fixed-point residues or exact modular residues for the coordinates.
enum Residues {
    Fixed(Vec<u128>),
    Modular(u128, Vec<u128>),
}

fn residues(ys: &[BigRational]) -> Residues {
    let den = ys.iter().fold(BigInt::one(), |acc, y| acc.lcm(y.denom()));
    if den.bits() <= 62 {
        let m = den.to_u128().expect("fits");
        let vals = ys
            .iter()
            .map(|y| {
                let num = y.numer() * (&den / y.denom());
                num.mod_floor(&den).to_u128().expect("reduced")
            })
            .collect();
        return Residues::Modular(m, vals);
    }
    Residues::Fixed(ys.iter().map(crate::numerics::rational_frac_fixed128).collect())
}

struct Raw {
    bins: Vec<Cand>,
    win: Option<Cand>,
    suspects: Vec<(u64, Vec<i64>)>,
    count: u64,
}

fn unpack<R: Ring>(tr: Tracker<R>) -> Raw {
    Raw { bins: tr.bins.into_iter().flatten().collect(), win: tr.win, suspects: tr.suspects, count: tr.count }
}

fn run_linear(ys: &[BigRational], q_max: u64, region: Region, scale: f64, lo: u64) -> Raw {
    let n = ys.len() as u128;
    match residues(ys) {
        Residues::Modular(m, vals) => unpack(search_linear(Modular(m), &vals, q_max, region, scale, lo, 0)),
        Residues::Fixed(vals) => {
            // truncation error is below one unit per unit of |q_i|
            let slack = n * q_max as u128 + 2;
            unpack(search_linear(Fixed, &vals, q_max, region, scale, lo, slack))
        }
    }
}

fn run_scalar(ys: &[BigRational], q_max: u64, lo: u64) -> Raw {
    match residues(ys) {
        Residues::Modular(m, vals) => unpack(search_scalar(Modular(m), &vals, q_max, lo, 0)),
        Residues::Fixed(vals) => unpack(search_scalar(Fixed, &vals, q_max, lo, q_max as u128 + 2)),
    }
}

fn isqrt_ceil(x: u64) -> u64 {
    let r = num_integer::Roots::sqrt(&x);
    if r * r < x {
        r + 1
    } else {
        r
    }
}

struct Assembled {
    witnesses: Vec<Witness>,
    raw_max: Exponent,
    window_estimate: Exponent,
    exact_hit: bool,
}

/// Exact re-evaluation of the screened candidates.
fn assemble(
    raw: &Raw,
    lo: &BigInt,
    scale: f64,
    bits: usize,
    materialize: impl Fn(&[i64]) -> (IntVector, Companion, BigRational, BigInt),
) -> Result<Assembled> {
    let mut keys: Vec<Vec<i64>> = raw.bins.iter().map(|c| c.q.clone()).collect();
    keys.extend(raw.win.iter().map(|c| c.q.clone()));
    keys.extend(raw.suspects.iter().map(|(_, q)| q.clone()));
    keys.sort();
    keys.dedup();
    let mut witnesses = Vec::new();
    for k in keys {
        let (q, p, err, height) = materialize(&k);
        let error = LogValue::from_scalar(&Scalar::Exact(err), bits);
        let quality = quality_of(&error, &height, scale, bits);
        witnesses.push(Witness { q, p, error, height: height.to_string(), height_int: height, quality });
    }
    finish(witnesses, lo)
}

fn finish(mut witnesses: Vec<Witness>, lo: &BigInt) -> Result<Assembled> {
    witnesses.sort_by(|a, b| (&a.height_int, &a.q).cmp(&(&b.height_int, &b.q)));
    let exact_hit = witnesses.iter().any(|w| w.error.is_zero());
    if exact_hit {
        // keep the smallest exact relation and the finite witnesses below it
        let first = witnesses.iter().position(|w| w.error.is_zero()).expect("present");
        let h = witnesses[first].height_int.clone();
        witnesses.retain(|w| !w.error.is_zero() || w.height_int == h);
        let mut seen = false;
        witnesses.retain(|w| {
            if w.error.is_zero() {
                let keep = !seen;
                seen = true;
                keep
            } else {
                true
            }
        });
        return Ok(Assembled { witnesses, raw_max: Exponent::Infinite, window_estimate: Exponent::Infinite, exact_hit });
    }
    let scored = |w: &&Witness| w.quality.is_some();
    let raw_max = witnesses
        .iter()
        .filter(scored)
        .filter_map(|w| w.quality)
        .fold(None, |acc: Option<Exponent>, e| Some(acc.map_or(e, |a| a.max(e))))
        .ok_or_else(|| Error::invalid("q_max", "no candidate of height above 1"))?;
    let window_estimate = witnesses
        .iter()
        .filter(scored)
        .filter(|w| &w.height_int >= lo)
        .filter_map(|w| w.quality)
        .fold(None, |acc: Option<Exponent>, e| Some(acc.map_or(e, |a| a.max(e))))
        .ok_or_else(|| Error::invalid("q_max", "the height window holds no candidate"))?;
    Ok(Assembled { witnesses, raw_max, window_estimate, exact_hit })
}

fn check_point(y: &RealVector) -> Result<()> {
    if y.dim() == 0 {
        return Err(Error::invalid("point", "empty vector"));
    }
    Ok(())
}

fn linear_estimate(y: &RealVector, q_max: u64, mode: Mode, opts: &SearchOptions) -> Result<ExponentEstimate> {
    check_point(y)?;
    if q_max < 2 {
        return Err(Error::invalid("q_max", "must be at least 2"));
    }
    if q_max > i64::MAX as u64 / 4 {
        return Err(Error::invalid("q_max", "too large for enumeration"));
    }
    let n = y.dim();
    let (region, scale, lo, needed, region_name) = match mode {
        Mode::Omega => (Region::Box, 1.0, q_max.div_ceil(2), engine::box_count(n, q_max), "sup_norm_box"),
        Mode::OmegaTimes => (
            Region::Hyperbolic,
            n as f64,
            isqrt_ceil(q_max),
            engine::hyperbolic_count(n, q_max),
            "hyperbolic_pi_plus",
        ),
        Mode::Sigma => unreachable!("sigma uses its own search"),
    };
    if needed > opts.budget {
        return Err(Error::budget(format!("{} enumeration", mode.name()), needed, opts.budget));
    }
    let ys = exact_coords(y);
    let raw = run_linear(&ys, q_max, region, scale, lo);
    let height = |q: &IntVector| match mode {
        Mode::Omega => q.sup_norm(),
        _ => pi_plus_int(q),
    };
    let lo_big = BigInt::from(lo);
    let asm = assemble(&raw, &lo_big, scale, opts.log_bits, |k| {
        let q = IntVector::from_i64(k);
        let (p, e) = companion_exact(&q, &ys);
        let h = height(&q);
        (q, Companion::Scalar(p), e, h)
    })?;
    Ok(ExponentEstimate {
        mode,
        q_max: q_max.to_string(),
        region: region_name,
        method: "enumeration",
        window: (lo.to_string(), q_max.to_string()),
        raw_max: asm.raw_max,
        window_estimate: asm.window_estimate,
        exact_hit: asm.exact_hit,
        candidates: raw.count,
        witnesses: asm.witnesses,
    })
}

/// Estimate `omega(y)` over the box `1 <= sup|q_i| <= q_max`; the window is
/// `[q_max/2, q_max]` in the sup norm.
pub fn estimate_omega(y: &RealVector, q_max: u64, opts: &SearchOptions) -> Result<ExponentEstimate> {
    linear_estimate(y, q_max, Mode::Omega, opts)
}

/// Estimate `omega_times(y)` over `Pi_+(q) <= q_max`; the window is
/// `[sqrt(q_max), q_max]` in `Pi_+`.
pub fn estimate_omega_times(y: &RealVector, q_max: u64, opts: &SearchOptions) -> Result<ExponentEstimate> {
    linear_estimate(y, q_max, Mode::OmegaTimes, opts)
}

/// Estimate `sigma(a)` over `1 <= q <= q_max`; the window is `[q_max/2, q_max]`.
///
/// Vectors with a single non-integer coordinate and `q_max` beyond the
/// enumeration budget are searched along continued-fraction denominators.
pub fn estimate_sigma(a: &RealVector, q_max: &BigInt, opts: &SearchOptions) -> Result<ExponentEstimate> {
    check_point(a)?;
    if q_max < &BigInt::from(2) {
        return Err(Error::invalid("q_max", "must be at least 2"));
    }
    let ys = exact_coords(a);
    let fits = q_max.to_u64().filter(|&q| (q as f64) <= opts.budget && q <= i64::MAX as u64 / 4);
    let lo = (q_max + 1u32) / 2u32;
    if let Some(qm) = fits {
        let raw = run_scalar(&ys, qm, qm.div_ceil(2));
        let asm = assemble(&raw, &lo, 1.0, opts.log_bits, |k| sigma_witness(k[0].into(), &ys))?;
        return Ok(ExponentEstimate {
            mode: Mode::Sigma,
            q_max: q_max.to_string(),
            region: "scalar_range",
            method: "enumeration",
            window: (lo.to_string(), q_max.to_string()),
            raw_max: asm.raw_max,
            window_estimate: asm.window_estimate,
            exact_hit: asm.exact_hit,
            candidates: raw.count,
            witnesses: asm.witnesses,
        });
    }
    let irr: Vec<usize> = (0..ys.len()).filter(|&i| !ys[i].is_integer()).collect();
    if irr.len() > 1 {
        return Err(Error::budget("sigma enumeration", q_max.to_f64().unwrap_or(f64::INFINITY), opts.budget));
    }
    let mut witnesses = Vec::new();
    let mut candidates = 0u64;
    if let Some(&i) = irr.first() {
        let frac = &ys[i] - ys[i].floor();
        let cf = cf_expand(&frac)?;
        // convergents of a stored binary value track the true number only while
        // q^2 stays well inside its mantissa
        let horizon = a.0[i].bits().map(|b| BigInt::one() << (b.saturating_sub(8) / 2));
        let mut dens: Vec<BigInt> = Vec::new();
        for (_, q) in &cf.convergents {
            if q > q_max {
                break;
            }
            if let Some(h) = &horizon {
                if q > h {
                    return Err(Error::PrecisionShortfall {
                        needed: 2 * q.bits() as usize + 8,
                        max: a.0[i].bits().unwrap_or(0),
                    });
                }
            }
            if q.is_positive() && !dens.contains(q) {
                dens.push(q.clone());
            }
        }
        // semiconvergents q_{k-1} + j q_k closest to both ends of the window
        let mut window: Vec<BigInt> = Vec::new();
        for k in 1..cf.convergents.len() {
            let (q_prev, q_k) = (&cf.convergents[k - 1].1, &cf.convergents[k].1);
            let Some(a_next) = cf.quotients.get(k + 1) else { break };
            let j_lo = Integer::div_ceil(&(&lo - q_prev), q_k).max(BigInt::one());
            let j_hi = Integer::div_floor(&(q_max - q_prev), q_k).min(a_next - 1u32);
            for j in [j_lo.clone(), j_hi.clone()] {
                if j >= BigInt::one() && j <= j_hi && j >= j_lo {
                    window.push(q_prev + j * q_k);
                }
            }
        }
        if let Some(top) = dens.last() {
            window.push((q_max / top) * top);
        }
        dens.extend(window.into_iter().filter(|s| s >= &lo && s <= q_max));
        dens.sort();
        dens.dedup();
        for q in dens {
            candidates += 1;
            let (qv, p, e, h) = sigma_witness(q, &ys);
            let error = LogValue::from_scalar(&Scalar::Exact(e), opts.log_bits.max(2 * h.bits() as usize + 64));
            let quality = quality_of(&error, &h, 1.0, opts.log_bits.max(64));
            witnesses.push(Witness { q: qv, p, error, height: h.to_string(), height_int: h, quality });
        }
    } else {
        candidates = 1;
        let (qv, p, e, h) = sigma_witness(BigInt::one(), &ys);
        let error = LogValue::from_scalar(&Scalar::Exact(e), opts.log_bits);
        witnesses.push(Witness { q: qv, p, error, height: h.to_string(), height_int: h, quality: None });
    }
    let witnesses = best_per_bin(witnesses, &lo);
    let asm = finish(witnesses, &lo)?;
    Ok(ExponentEstimate {
        mode: Mode::Sigma,
        q_max: q_max.to_string(),
        region: "scalar_range",
        method: "continued_fraction",
        window: (lo.to_string(), q_max.to_string()),
        raw_max: asm.raw_max,
        window_estimate: asm.window_estimate,
        exact_hit: asm.exact_hit,
        candidates,
        witnesses: asm.witnesses,
    })
}

/// Keep exact relations, the best witness of each dyadic bin and the best
/// witness inside the window.
fn best_per_bin(ws: Vec<Witness>, lo: &BigInt) -> Vec<Witness> {
    let key = |w: &Witness| w.quality.map(|e| e.to_f64()).unwrap_or(f64::NEG_INFINITY);
    let mut bins: BTreeMap<u64, Witness> = BTreeMap::new();
    let mut win: Option<Witness> = None;
    let mut out = Vec::new();
    for w in ws {
        if w.error.is_zero() {
            out.push(w);
            continue;
        }
        if &w.height_int >= lo && win.as_ref().is_none_or(|c| key(&w) > key(c)) {
            win = Some(w.clone());
        }
        let b = w.height_int.bits();
        if bins.get(&b).is_none_or(|c| key(&w) > key(c)) {
            bins.insert(b, w);
        }
    }
    out.extend(bins.into_values());
    if let Some(w) = win {
        if !out.iter().any(|x| x.q == w.q) {
            out.push(w);
        }
    }
    out
}

fn sigma_witness(q: BigInt, ys: &[BigRational]) -> (IntVector, Companion, BigRational, BigInt) {
    let qr = BigRational::from_integer(q.clone());
    let mut ps = Vec::with_capacity(ys.len());
    let mut worst = BigRational::zero();
    for y in ys {
        let s = &qr * y;
        let p = -round_half_even_rational(&s);
        let e = (s + BigRational::from_integer(p.clone())).abs();
        if e > worst {
            worst = e;
        }
        ps.push(p);
    }
    (IntVector(vec![q.clone()]), Companion::Vector(IntVector(ps)), worst, q)
}

impl ExponentEstimate {
    /// The screened witness with the highest quality.
    pub fn best_witness(&self) -> Option<&Witness> {
        self.witnesses.iter().filter(|w| w.quality.is_some()).max_by(|a, b| {
            a.quality.expect("scored").total_cmp(&b.quality.expect("scored"))
        })
    }
}

#[cfg(test)]
mod tests;
