//! Monte Carlo probes of sublevel sets and of short vectors along flowed
//! curves.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{apply_flow, shortest_vector, u_of_y, FlowVector};
use crate::numerics::{PolyMap, Polynomial, RealVector, Scalar};

/// Normal quantile for 95% intervals.
const Z95: f64 = 1.959963984540054;
/// Most lattice reductions a single probe may run.
pub const MAX_REDUCTIONS: u64 = 20_000_000;

/// Wilson score interval `(lo, hi)` for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (hits as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Least-squares slope of `ys` against `xs`; `None` below two points.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// `2^-lo, ..., 2^-hi`.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderPoint {
    pub epsilon: f64,
    pub fraction: f64,
    pub ci_halfwidth: f64,
    pub ci: (f64, f64),
    pub hits: u64,
    pub samples: u64,
}

fn ladder_point(epsilon: f64, hits: u64, samples: u64) -> LadderPoint {
    let ci = wilson_interval(hits, samples);
    LadderPoint { epsilon, fraction: hits as f64 / samples as f64, ci_halfwidth: (ci.1 - ci.0) / 2.0, ci, hits, samples }
}

/// Slopes of `log fraction` against `log epsilon` over the points with
/// `0 < fraction < 1`: the least-squares fit and a conservative value from
/// the Wilson bounds at the two ends.
fn ladder_slopes(points: &[LadderPoint]) -> (Option<f64>, Option<f64>) {
    let live: Vec<&LadderPoint> = points.iter().filter(|p| p.hits > 0 && p.hits < p.samples).collect();
    let xs: Vec<f64> = live.iter().map(|p| p.epsilon.ln()).collect();
    let ys: Vec<f64> = live.iter().map(|p| p.fraction.ln()).collect();
    let fit = fit_slope(&xs, &ys);
    let lo_eps = live.iter().min_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let hi_eps = live.iter().max_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let cons = match (lo_eps, hi_eps) {
        (Some(s), Some(l)) if l.epsilon > s.epsilon && s.ci.1 > 0.0 && l.ci.0 > 0.0 => {
            Some((l.ci.0 / s.ci.1).ln() / (l.epsilon / s.epsilon).ln())
        }
        _ => None,
    };
    (fit, cons)
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodFunctionReport {
    pub function: String,
    pub degree: usize,
    pub interval: (f64, f64),
    pub seed: u64,
    pub points: Vec<LadderPoint>,
    /// Least-squares slope over the decaying range.
    pub slope: Option<f64>,
    pub slope_conservative: Option<f64>,
}

/// Fraction of uniform samples `x` in `[lo, hi]` with `|f(x)| < epsilon`.
pub fn sublevel_fraction(
    f: &Polynomial,
    interval: (f64, f64),
    eps_ladder: &[f64],
    samples: u64,
    seed: u64,
) -> Result<GoodFunctionReport> {
    if f.is_constant() {
        return Err(Error::invalid("function", "constant polynomial"));
    }
    if samples < 10_000 {
        return Err(Error::invalid("samples", format!("need at least 10000, got {samples}")));
    }
    check_interval(interval)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..samples).map(|_| f.eval_f64(rng.gen_range(interval.0..interval.1)).abs()).collect();
    let points: Vec<LadderPoint> = eps_ladder
        .iter()
        .map(|&e| ladder_point(e, values.iter().filter(|&&v| v < e).count() as u64, samples))
        .collect();
    let (slope, slope_conservative) = ladder_slopes(&points);
    Ok(GoodFunctionReport { function: f.to_string(), degree: f.degree(), interval, seed, points, slope, slope_conservative })
}

fn check_interval(b: (f64, f64)) -> Result<()> {
    if !(b.0.is_finite() && b.1.is_finite() && b.0 < b.1) {
        return Err(Error::invalid("interval", format!("[{}, {}] is empty", b.0, b.1)));
    }
    Ok(())
}

/// Bits of each sampled curve parameter.
const PARAM_BITS: u32 = 64;

fn draw_params(interval: (f64, f64), samples: u64, seed: u64) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = BigRational::from_float(interval.0).expect("finite");
    let width = BigRational::from_float(interval.1 - interval.0).expect("finite");
    let den = BigInt::from(1u8) << PARAM_BITS;
    (0..samples)
        .map(|_| Scalar::Exact(&lo + &width * BigRational::new(BigInt::from(rng.gen::<u64>()), den.clone())))
        .collect()
}

/// `delta(g_t u_{f(x)} Z^{n+1})`.
fn shortest_length(y: &RealVector, t: &FlowVector) -> Result<f64> {
    Ok(shortest_vector(&apply_flow(&u_of_y(y), t)?)?.length())
}

fn check_map(f: &PolyMap) -> Result<()> {
    if f.dim() == 0 || f.dim() > 3 {
        return Err(Error::invalid("curve", format!("needs 1 to 3 components, got {}", f.dim())));
    }
    Ok(())
}

fn check_budget(samples: u64, flows: u64) -> Result<()> {
    let work = samples.saturating_mul(flows);
    if work > MAX_REDUCTIONS {
        return Err(Error::budget("lattice reductions", work as f64, MAX_REDUCTIONS as f64));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeRow {
    pub t: Vec<f64>,
    pub t_total: f64,
    pub points: Vec<LadderPoint>,
    pub alpha: Option<f64>,
    pub alpha_conservative: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeReport {
    pub curve: String,
    pub interval: (f64, f64),
    pub seed: u64,
    pub samples: u64,
    pub rows: Vec<EscapeRow>,
}

/// For each flow, the fraction of sampled `x` whose flowed lattice
/// `g_t u_{f(x)} Z^{n+1}` has a nonzero vector shorter than each `epsilon`.
pub fn escape_fraction(
    f: &PolyMap,
    interval: (f64, f64),
    flows: &[FlowVector],
    eps_ladder: &[f64],
    samples: u64,
    seed: u64,
) -> Result<EscapeReport> {
    check_map(f)?;
    check_interval(interval)?;
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    check_budget(samples, flows.len() as u64)?;
    if let Some(t) = flows.iter().find(|t| t.dim() != f.dim()) {
        return Err(Error::invalid("t", format!("flow of dimension {} for a curve in R^{}", t.dim(), f.dim())));
    }
    let params = draw_params(interval, samples, seed);
    let points: Vec<RealVector> = params.iter().map(|x| RealVector(f.eval(x))).collect();
    let mut rows = Vec::with_capacity(flows.len());
    for t in flows {
        let deltas = points.par_iter().map(|y| shortest_length(y, t)).collect::<Result<Vec<f64>>>()?;
        let pts: Vec<LadderPoint> = eps_ladder
            .iter()
            .map(|&e| ladder_point(e, deltas.iter().filter(|&&d| d < e).count() as u64, samples))
            .collect();
        let (alpha, alpha_conservative) = ladder_slopes(&pts);
        rows.push(EscapeRow {
            t: t.components().iter().map(|x| x.to_f64()).collect(),
            t_total: t.total().to_f64(),
            points: pts,
            alpha,
            alpha_conservative,
        });
    }
    Ok(EscapeReport { curve: f.to_string(), interval, seed, samples, rows })
}

/// `t = (total/n, ..., total/n)`.
pub fn equal_split(n: usize, total: f64) -> Result<FlowVector> {
    FlowVector::from_f64(&vec![total / n as f64; n])
}

#[derive(Clone, Debug, Serialize)]
pub struct BorelCantelliRow {
    pub t_total: u64,
    /// Admissible integer flows at this total.
    pub admissible: u64,
    /// Mean measure of the event over the admissible flows.
    pub measure: f64,
    pub ci_halfwidth: f64,
    pub increment: f64,
    pub partial_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BorelCantelliReport {
    pub curve: String,
    pub k: usize,
    pub d: f64,
    pub seed: u64,
    pub samples: u64,
    pub rows: Vec<BorelCantelliRow>,
    /// `exp` of the fitted slope of `log increment` against the total.
    pub decay_ratio: Option<f64>,
}

/// Integer flows with the given total and `t_i >= d * total` for at least
/// `k` indices.
pub fn admissible_flows(n: usize, k: usize, d: f64, total: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    rec(0, total, &mut cur, &mut out);
    let bound = d * total as f64;
    out.retain(|t| t.iter().filter(|&&x| x as f64 >= bound).count() >= k);
    out
}

/// Partial sums over totals `1..=t_max` of the measure of
/// `{x : g_t u_{f(x)} Z^{n+1} has a nonzero vector of norm <= e^{-d t}}`
/// summed over admissible integer `t`.
pub fn borel_cantelli_probe(
    f: &PolyMap,
    interval: (f64, f64),
    k: usize,
    d: f64,
    t_max: u64,
    samples: u64,
    seed: u64,
) -> Result<BorelCantelliReport> {
    check_map(f)?;
    check_interval(interval)?;
    let n = f.dim();
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("must lie in 1..={n}")));
    }
    if !(d > 0.0 && d < 1.0 / k as f64) {
        return Err(Error::invalid("d", format!("{d} is outside (0, 1/k)")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let grids: Vec<Vec<Vec<u64>>> = (1..=t_max).map(|tt| admissible_flows(n, k, d, tt)).collect();
    check_budget(samples, grids.iter().map(|g| g.len() as u64).sum())?;
    let params = draw_params(interval, samples, seed);
    let points: Vec<RealVector> = params.iter().map(|x| RealVector(f.eval(x))).collect();
    let mut rows = Vec::new();
    let mut partial = 0.0;
    for (i, grid) in grids.iter().enumerate() {
        let total = i as u64 + 1;
        let bound = (-d * total as f64).exp();
        let mut hits = 0u64;
        for t in grid {
            let flow = FlowVector::from_ints(t);
            let h = points
                .par_iter()
                .map(|y| shortest_length(y, &flow).map(|l| u64::from(l <= bound)))
                .collect::<Result<Vec<u64>>>()?;
            hits += h.iter().sum::<u64>();
        }
        let trials = samples * grid.len() as u64;
        let measure = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let (lo, hi) = wilson_interval(hits, trials);
        let increment = measure * grid.len() as f64;
        partial += increment;
        rows.push(BorelCantelliRow {
            t_total: total,
            admissible: grid.len() as u64,
            measure,
            ci_halfwidth: (hi - lo) / 2.0,
            increment,
            partial_sum: partial,
        });
    }
    let live: Vec<&BorelCantelliRow> = rows.iter().filter(|r| r.increment > 0.0).collect();
    let xs: Vec<f64> = live.iter().map(|r| r.t_total as f64).collect();
    let ys: Vec<f64> = live.iter().map(|r| r.increment.ln()).collect();
    let decay_ratio = fit_slope(&xs, &ys).map(f64::exp);
    Ok(BorelCantelliReport { curve: f.to_string(), k, d, seed, samples, rows, decay_ratio })
}
