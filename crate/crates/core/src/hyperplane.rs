//! Affine hyperplanes `{(a_1 x_1 + ... + a_{n-1} x_{n-1} + a_n, x_1, ..., x_{n-1})}`:
//! closed-form exponents and sampling checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::input::ParsedValue;
use crate::numerics::{Exponent, PolyMap, RealVector, Scalar};
use crate::witnesses::{estimate_omega_times, estimate_sigma, SearchOptions};

/// Search height used when `sigma(a)` has to be estimated.
pub const SIGMA_ESTIMATE_QMAX: u64 = 1_000_000;

/// How `sigma(a)` was obtained.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SigmaSource {
    /// Every coefficient is rational.
    Rational,
    /// A single irrational coefficient with a known exponent.
    Known { value: Exponent },
    /// Window estimate of the simultaneous exponent.
    Estimated { value: Exponent, q_max: String },
}

impl SigmaSource {
    pub fn value(&self) -> Exponent {
        match self {
            SigmaSource::Rational => Exponent::Infinite,
            SigmaSource::Known { value } | SigmaSource::Estimated { value, .. } => *value,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperplaneSpec {
    pub n: usize,
    #[serde(serialize_with = "render_values")]
    pub a: Vec<ParsedValue>,
    pub s: usize,
    pub sigma: SigmaSource,
}

fn render_values<S: serde::Serializer>(a: &[ParsedValue], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(a.iter().map(|v| &v.literal))
}

/// `1 +` the number of nonzero entries among all but the last coefficient.
pub fn stratum_s(a: &[Scalar]) -> usize {
    1 + a[..a.len().saturating_sub(1)].iter().filter(|x| !x.is_zero()).count()
}

impl HyperplaneSpec {
    /// Coefficients `(a_1, ..., a_n)`, `n >= 2`.
    pub fn new(a: Vec<ParsedValue>) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::invalid("coeffs", format!("need at least 2 coefficients, got {n}")));
        }
        let values: Vec<Scalar> = a.iter().map(|v| v.value.clone()).collect();
        let s = stratum_s(&values);
        let irr: Vec<&ParsedValue> = a.iter().filter(|v| !v.is_rational()).collect();
        let sigma = match irr.len() {
            0 => SigmaSource::Rational,
            1 => SigmaSource::Known { value: irr[0].sigma },
            _ => {
                let q = BigInt::from(SIGMA_ESTIMATE_QMAX);
                let est = estimate_sigma(&RealVector(values), &q, &SearchOptions::default())?;
                SigmaSource::Estimated { value: est.window_estimate, q_max: q.to_string() }
            }
        };
        Ok(HyperplaneSpec { n, a, s, sigma })
    }

    pub fn coefficients(&self) -> Vec<Scalar> {
        self.a.iter().map(|v| v.value.clone()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub n: usize,
    pub s: usize,
    pub sigma: Exponent,
    pub omega_times_l: Exponent,
    pub omega_l: Exponent,
    /// `s < n` while both formulas return the same value.
    pub gap_flag: bool,
}

/// `omega_times(L) = max(n, (n/s) sigma(a))` and `omega(L) = max(n, sigma(a))`.
pub fn predict(spec: &HyperplaneSpec) -> Prediction {
    let n = spec.n as f64;
    let sigma = spec.sigma.value();
    let scaled = match sigma {
        Exponent::Finite(x) => Exponent::Finite(n / spec.s as f64 * x),
        Exponent::Infinite => Exponent::Infinite,
    };
    let omega_times_l = Exponent::Finite(n).max(scaled);
    let omega_l = Exponent::Finite(n).max(sigma);
    let gap_flag = spec.s < spec.n && omega_times_l == omega_l;
    Prediction { n: spec.n, s: spec.s, sigma, omega_times_l, omega_l, gap_flag }
}

/// `omega_times` of `{(x_1, ..., x_{n-1}, a)}`: `n sigma(a)`.
pub fn special_case_predict(n: usize, a: &ParsedValue) -> Exponent {
    match a.sigma {
        Exponent::Finite(x) => Exponent::Finite(n as f64 * x),
        Exponent::Infinite => Exponent::Infinite,
    }
}

/// The point `(a_1 x_1 + ... + a_{n-1} x_{n-1} + a_n, x_1, ..., x_{n-1})`.
pub fn embed_point(spec: &HyperplaneSpec, x: &RealVector) -> Result<RealVector> {
    if x.dim() + 1 != spec.n {
        return Err(Error::invalid("x", format!("dimension {} for a hyperplane in R^{}", x.dim(), spec.n)));
    }
    let a = spec.coefficients();
    let mut first = a[spec.n - 1].clone();
    for (ai, xi) in a.iter().zip(&x.0) {
        if !ai.is_zero() {
            first = &first + &(ai * xi);
        }
    }
    let mut out = vec![first];
    out.extend(x.0.iter().cloned());
    Ok(RealVector(out))
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub q_max: u64,
    /// Half-width of the accepted band around the prediction.
    pub tolerance: f64,
    pub seed: u64,
    /// Curve `R -> R^{n-1}` composed with the embedding.
    pub submanifold: Option<PolyMap>,
    /// Target for the predicted value; defaults to `predict(spec).omega_times_l`.
    pub prediction: Option<Exponent>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub sample_index: usize,
    pub parameter: Vec<String>,
    pub point: Vec<String>,
    pub omega_times_estimate: Exponent,
    pub prediction: Exponent,
    pub within_tolerance: bool,
    pub exact_hit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub prediction: Exponent,
    pub tolerance: f64,
    pub q_max: u64,
    pub submanifold: Option<String>,
    pub rows: Vec<SampleRow>,
    /// Samples whose estimate exceeds the prediction plus the tolerance.
    pub flagged: Vec<usize>,
    pub all_within: bool,
    pub min_estimate: Exponent,
    pub max_estimate: Exponent,
}

/// Bits in each sampled parameter coordinate.
const SAMPLE_BITS: u32 = 128;
/// Parameters within this distance of a small rational relation are redrawn.
const RELATION_GAP: f64 = 1e-6;
const RELATION_HEIGHT: i64 = 8;

fn near_relation(u: &[f64]) -> bool {
    let m = u.len();
    let side = (2 * RELATION_HEIGHT + 1) as usize;
    let mut q = vec![-RELATION_HEIGHT; m];
    for _ in 0..side.pow(m as u32) {
        if q.iter().any(|&c| c != 0) {
            let s: f64 = q.iter().zip(u).map(|(&c, x)| c as f64 * x).sum();
            if (s - s.round()).abs() < RELATION_GAP {
                return true;
            }
        }
        for c in q.iter_mut() {
            if *c < RELATION_HEIGHT {
                *c += 1;
                break;
            }
            *c = -RELATION_HEIGHT;
        }
    }
    false
}

/// Uniform dyadic parameters in `[0, 1)^m`, redrawn near small relations.
pub fn draw_parameters(rng: &mut ChaCha8Rng, m: usize) -> Vec<BigRational> {
    let den = BigInt::from(1u8) << SAMPLE_BITS;
    loop {
        let u: Vec<BigRational> = (0..m).map(|_| BigRational::new(BigInt::from(rng.gen::<u128>()), den.clone())).collect();
        let f: Vec<f64> = u.iter().map(crate::numerics::rational_to_f64).collect();
        if !near_relation(&f) {
            return u;
        }
    }
}

/// Sample points of the hyperplane (or of a curve inside it) and compare
/// their `omega_times` window estimates with the prediction.
pub fn verify_by_sampling(spec: &HyperplaneSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    if opts.samples < 10 {
        return Err(Error::invalid("samples", format!("need at least 10, got {}", opts.samples)));
    }
    let m = match &opts.submanifold {
        Some(map) => {
            if map.dim() != spec.n - 1 {
                return Err(Error::invalid("submanifold", format!("map into R^{} for a hyperplane needing R^{}", map.dim(), spec.n - 1)));
            }
            1
        }
        None => spec.n - 1,
    };
    let prediction = opts.prediction.unwrap_or_else(|| predict(spec).omega_times_l);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let params: Vec<Vec<BigRational>> = (0..opts.samples).map(|_| draw_parameters(&mut rng, m)).collect();
    let search = SearchOptions::default();
    let rows = params
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let u_s: Vec<Scalar> = u.iter().cloned().map(Scalar::Exact).collect();
            let x = match &opts.submanifold {
                Some(map) => RealVector(map.eval(&u_s[0])),
                None => RealVector(u_s.clone()),
            };
            let y = embed_point(spec, &x)?;
            let est = estimate_omega_times(&y, opts.q_max, &search)?;
            let e = est.window_estimate;
            let within = match prediction {
                Exponent::Infinite => est.exact_hit,
                Exponent::Finite(p) => !est.exact_hit && (e.to_f64() - p).abs() <= opts.tolerance,
            };
            Ok(SampleRow {
                sample_index: i,
                parameter: u_s.iter().map(|v| format!("{:.12}", v.to_f64())).collect(),
                point: y.0.iter().map(|v| format!("{:.12}", v.to_f64())).collect(),
                omega_times_estimate: e,
                prediction,
                within_tolerance: within,
                exact_hit: est.exact_hit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = rows
        .iter()
        .filter(|r| match prediction {
            Exponent::Finite(p) => r.omega_times_estimate.to_f64() > p + opts.tolerance,
            Exponent::Infinite => false,
        })
        .map(|r| r.sample_index)
        .collect();
    let fold = |f: fn(Exponent, Exponent) -> Exponent| rows.iter().map(|r| r.omega_times_estimate).reduce(f).unwrap_or(Exponent::Finite(f64::NAN));
    let min_estimate = fold(|a, b| if b.total_cmp(&a).is_lt() { b } else { a });
    let max_estimate = fold(Exponent::max);
    Ok(VerificationReport {
        prediction,
        tolerance: opts.tolerance,
        q_max: opts.q_max,
        submanifold: opts.submanifold.as_ref().map(|m| m.to_string()),
        all_within: rows.iter().all(|r| r.within_tolerance),
        rows,
        flagged,
        min_estimate,
        max_estimate,
    })
}

#[cfg(test)]
mod tests;
