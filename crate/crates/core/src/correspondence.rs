//! Contraction rates, the witness/flow dictionary and the `gamma_k` estimator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{stratum_min_sup, FlowVector};
use crate::numerics::{
    ln_bigint, pi_plus_int, serialize_display, Exponent, IntVector, LogValue, PrecisionReal, RealVector, Scalar,
    DEFAULT_MANTISSA_BITS,
};

/// Log-domain slack for the flow inequalities.
pub const LOG_TOL: f64 = 1e-9;

/// Step of the candidate rate grid, as a denominator.
pub const RATE_STEPS: u32 = 100;

/// A pair `(v, c)` with `c = (v - n)/(kv + n)`.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionRate {
    pub n: usize,
    pub k: usize,
    pub v: Scalar,
    pub c: Scalar,
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::invalid("k", format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(())
}

/// Contraction rate of quality `v`.
pub fn c_from_v(n: usize, k: usize, v: &Scalar) -> Result<ContractionRate> {
    check_nk(n, k)?;
    let nn = Scalar::int(n as i64);
    if v.cmp_value(&nn).is_lt() {
        return Err(Error::invalid("v", format!("{} is below n = {n}", v.render())));
    }
    let num = v - &nn;
    let den = &(&Scalar::int(k as i64) * v) + &nn;
    let c = num.checked_div(&den)?;
    Ok(ContractionRate { n, k, v: v.clone(), c })
}

/// Quality certified by contraction rate `c`.
pub fn v_from_c(n: usize, k: usize, c: &Scalar) -> Result<Scalar> {
    check_nk(n, k)?;
    let kk = Scalar::int(k as i64);
    if c.signum() < 0 || (&kk * c).cmp_value(&Scalar::int(1)).is_ge() {
        return Err(Error::invalid("c", format!("{} is outside [0, 1/{k})", c.render())));
    }
    let nn = Scalar::int(n as i64);
    let num = &nn + &(&nn * c);
    let den = &Scalar::int(1) - &(&kk * c);
    num.checked_div(&den)
}

fn real(x: &Scalar, bits: usize) -> PrecisionReal {
    x.to_real(bits)
}

fn ln_abs_int(z: &BigInt, bits: usize) -> Result<PrecisionReal> {
    ln_bigint(&z.abs(), bits)
}

/// Flow parameters attached to an approximation `(x, z)` of quality `v`.
///
/// With `k` the support size of `z` and `c = c_from_v(n, k, v)`, the total is
/// `t = ln Pi_+(z) / (1 - kc)` and `t_i = ct + ln|z_i|` on the support.
pub fn forward_witness(x: &Scalar, z: &IntVector, n: usize, v: &Scalar) -> Result<FlowVector> {
    if z.dim() != n {
        return Err(Error::invalid("z", format!("length {} for n = {n}", z.dim())));
    }
    let support = z.support();
    let k = support.len();
    if k == 0 {
        return Err(Error::invalid("z", "zero vector"));
    }
    if v.cmp_value(&Scalar::int(n as i64)).is_le() {
        return Err(Error::invalid("v", "must exceed n"));
    }
    let rate = c_from_v(n, k, v)?;
    let bits = DEFAULT_MANTISSA_BITS.max(v.bits().unwrap_or(0)).max(x.bits().unwrap_or(0));
    let c = real(&rate.c, bits);
    let vr = real(v, bits);
    let nr = PrecisionReal::from_i64(n as i64, bits);
    let ln_pi = ln_bigint(&pi_plus_int(z), bits)?;
    let lx = LogValue::from_scalar(x, bits);
    let bound = -(&(&vr / &nr) * &ln_pi);
    if !lx.abs_le_exp(&bound, LOG_TOL) {
        return Err(Error::domain(format!(
            "|x| <= Pi_+(z)^(-v/n) fails: ln|x| = {:.12} > {:.12}",
            lx.log_f64(),
            bound.to_f64()
        )));
    }
    let one = PrecisionReal::one(bits);
    let t = &ln_pi / &(&one - &(&PrecisionReal::from_i64(k as i64, bits) * &c));
    let ct = &c * &t;
    let mut ts = vec![PrecisionReal::zero(bits); n];
    for &i in &support {
        ts[i] = &ct + &ln_abs_int(&z.0[i], bits)?;
    }
    let flow = FlowVector::new(ts)?;
    check_flow_inequalities(&flow, &lx, z, &ct)?;
    Ok(flow)
}

/// `max(e^t |x|, e^{-t_i} |z_i|) <= e^{-ct}` in the log domain.
fn check_flow_inequalities(flow: &FlowVector, lx: &LogValue, z: &IntVector, ct: &PrecisionReal) -> Result<()> {
    let bits = ct.mantissa_bits();
    let neg = -ct;
    let t = flow.total();
    if !lx.scale_exp(&t).abs_le_exp(&neg, LOG_TOL) {
        return Err(Error::domain(format!(
            "e^t|x| <= e^(-ct) fails: {:.12} > {:.12}",
            (lx.log_f64() + t.to_f64()),
            neg.to_f64()
        )));
    }
    for (i, zi) in z.0.iter().enumerate() {
        if zi.is_zero() {
            continue;
        }
        let lz = &ln_abs_int(zi, bits)? - &flow.components()[i];
        if lz.to_f64() > neg.to_f64() + LOG_TOL {
            return Err(Error::domain(format!(
                "e^(-t_{})|z_{}| <= e^(-ct) fails: {:.12} > {:.12}",
                i + 1,
                i + 1,
                lz.to_f64(),
                neg.to_f64()
            )));
        }
    }
    Ok(())
}

/// Outcome of the converse direction.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub v: Scalar,
    pub c: Scalar,
    /// Number of indices with `t_i >= ct`.
    pub restriction_count: usize,
    pub log_abs_x: f64,
    pub log_pi_plus: f64,
    /// `x = 0`: every quality holds, and the approximation says nothing
    /// about growth of `z` on its own.
    pub degenerate: bool,
}

/// Certify `|x| <= Pi_+(z)^{-v/n}` with `v = v_from_c(n, k, c)` from a flow
/// witness at rate `c`.
pub fn backward_witness(t: &FlowVector, x: &Scalar, z: &IntVector, n: usize, k: usize, c: &Scalar) -> Result<Certificate> {
    check_nk(n, k)?;
    if t.dim() != n || z.dim() != n {
        return Err(Error::invalid("t", "dimension mismatch"));
    }
    let v = v_from_c(n, k, c)?;
    let bits = DEFAULT_MANTISSA_BITS.max(t.total().mantissa_bits()).max(x.bits().unwrap_or(0));
    let total = t.total().widen(bits);
    if total.is_zero() && !c.is_zero() {
        return Err(Error::domain("a zero flow certifies only c = 0"));
    }
    let cr = real(c, bits);
    let ct = &cr * &total;
    let lx = LogValue::from_scalar(x, bits);
    check_flow_inequalities(t, &lx, z, &ct)?;
    let count = t.components().iter().filter(|ti| ti.to_f64() >= ct.to_f64() - LOG_TOL).count();
    if count < k {
        return Err(Error::domain(format!("restriction t_i >= ct holds for {count} indices, need {k}")));
    }
    // only indices with t_i - ct >= 0 can bound |z_i|_+, and there are at least k of them
    let ln_pi = ln_bigint(&pi_plus_int(z), bits)?;
    let kk = PrecisionReal::from_i64(k as i64, bits);
    let pi_bound = &total - &(&kk * &ct);
    if ln_pi.to_f64() > pi_bound.to_f64() + LOG_TOL {
        return Err(Error::domain(format!(
            "Pi_+(z) <= e^(t-kct) fails: {:.12} > {:.12}",
            ln_pi.to_f64(),
            pi_bound.to_f64()
        )));
    }
    let vn = &real(&v, bits) / &PrecisionReal::from_i64(n as i64, bits);
    let target = -(&vn * &ln_pi);
    if !lx.abs_le_exp(&target, LOG_TOL) {
        return Err(Error::domain("certified quality bound fails"));
    }
    Ok(Certificate {
        v,
        c: c.clone(),
        restriction_count: count,
        log_abs_x: lx.log_f64(),
        log_pi_plus: ln_pi.to_f64(),
        degenerate: lx.is_zero(),
    })
}

/// Best certified rate for one `k`.
#[derive(Clone, Debug, Serialize)]
pub struct GammaEntry {
    pub k: usize,
    pub gamma: f64,
    /// A zero-error stratum vector was met: `gamma_k` sits at `1/k`.
    pub boundary: bool,
    pub certified_v: Exponent,
    pub witness: Option<GammaWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaWitness {
    pub t: Vec<u64>,
    pub q: IntVector,
    #[serde(serialize_with = "serialize_display")]
    pub p: BigInt,
    pub x: Scalar,
    pub sup_log: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaTable {
    pub n: usize,
    pub t_max: u64,
    pub grid_points: usize,
    pub entries: Vec<GammaEntry>,
}

/// Integer flows with total in `[ceil(t_max/2), t_max]`.
pub fn flow_grid(n: usize, t_max: u64) -> Vec<Vec<u64>> {
    fn rec(n: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>, lo: u64, used: u64) {
        if cur.len() == n {
            if used >= lo {
                out.push(cur.clone());
            }
            return;
        }
        for ti in 0..=left {
            cur.push(ti);
            rec(n, left - ti, cur, out, lo, used + ti);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, t_max, &mut Vec::with_capacity(n), &mut out, t_max.div_ceil(2), 0);
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Largest grid step `j` (rate `j / RATE_STEPS`) certified at this flow.
fn certified_step(k: usize, t: &[u64], sup_log: f64) -> Option<u32> {
    let total: u64 = t.iter().sum();
    let mut sorted = t.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let kth = sorted[k - 1] as f64;
    let total = total as f64;
    let j_max = RATE_STEPS / k as u32 - 1;
    (0..=j_max).rev().find(|&j| {
        let c = f64::from(j) / f64::from(RATE_STEPS);
        sup_log <= -c * total + 1e-12 && kth >= c * total
    })
}

/// `gamma_k` proxies from shortest stratum vectors along an integer flow grid.
pub fn estimate_gamma(y: &RealVector, t_max: u64) -> Result<GammaTable> {
    let n = y.dim();
    if t_max < 1 {
        return Err(Error::invalid("t_max", "must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("y", "empty vector"));
    }
    let grid = flow_grid(n, t_max);
    let mut entries = Vec::with_capacity(n);
    for k in 1..=n {
        let supports = subsets(n, k);
        let found: Vec<(u32, bool, GammaWitness)> = grid
            .par_iter()
            .map(|t| -> Result<Option<(u32, bool, GammaWitness)>> {
                let flow = FlowVector::from_ints(t);
                let mut best: Option<(f64, GammaWitness)> = None;
                for s in &supports {
                    if let Some(v) = stratum_min_sup(y, &flow, s, 0.0)? {
                        if best.as_ref().is_none_or(|(b, _)| v.sup_log < *b) {
                            let w = GammaWitness { t: t.clone(), q: v.q, p: v.p, x: v.x, sup_log: v.sup_log };
                            best = Some((v.sup_log, w));
                        }
                    }
                }
                Ok(best.and_then(|(s, w)| {
                    let zero = w.x.is_exact() && w.x.is_zero();
                    certified_step(k, t, s).map(|j| (j, zero, w))
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let boundary = found.iter().any(|f| f.1);
        // highest rate, then the earliest grid point
        let best = found.into_iter().fold(None::<(u32, bool, GammaWitness)>, |acc, f| match acc {
            Some(a) if a.0 >= f.0 => Some(a),
            _ => Some(f),
        });
        let (gamma, witness) = match best {
            Some((j, _, w)) => (f64::from(j) / f64::from(RATE_STEPS), Some(w)),
            None => (0.0, None),
        };
        let certified_v = if boundary {
            Exponent::Infinite
        } else {
            gamma_formula(n, k, gamma)
        };
        entries.push(GammaEntry { k, gamma: if boundary { 1.0 / k as f64 } else { gamma }, boundary, certified_v, witness });
    }
    Ok(GammaTable { n, t_max, grid_points: grid.len(), entries })
}

/// `(n + n gamma) / (1 - k gamma)`, infinite at the boundary `gamma = 1/k`.
pub fn gamma_formula(n: usize, k: usize, gamma: f64) -> Exponent {
    let den = 1.0 - k as f64 * gamma;
    if den <= 0.0 {
        return Exponent::Infinite;
    }
    Exponent::Finite(n as f64 * (1.0 + gamma) / den)
}

/// `max_k (n + n gamma_k) / (1 - k gamma_k)`; ties keep the smallest `k`.
pub fn omega_times_from_gamma(table: &GammaTable) -> Exponent {
    let mut best = Exponent::Finite(table.n as f64);
    for e in &table.entries {
        let v = if e.boundary { Exponent::Infinite } else { gamma_formula(table.n, e.k, e.gamma) };
        if v.total_cmp(&best).is_gt() {
            best = v;
        }
    }
    best
}

/// Exact rational rate `j / RATE_STEPS`.
pub fn grid_rate(j: u32) -> Scalar {
    Scalar::Exact(BigRational::new(BigInt::from(j), BigInt::from(RATE_STEPS)))
}
