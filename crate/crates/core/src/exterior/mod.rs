//! Integer multivectors, the contraction map `c(w)`, the hyperplane matrix
//! `R_0` and the flow action on exterior powers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::cf_expand;
use crate::error::{Error, Result};
use crate::lattice::{enumerate, lll, FlowVector};
use crate::numerics::{IntVector, LogValue, PolyMap, PrecisionReal, RealVector, Scalar, DEFAULT_MANTISSA_BITS};

/// Strictly increasing zero-based indices into `0..dim`; index `dim - 1`
/// is the expanding coordinate.
pub type IndexSet = Vec<usize>;

/// `(-1)^m` as an integer.
fn parity(m: usize) -> i32 {
    if m % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Element of the `j`-th exterior power of `Z^dim` in the basis `e_I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    terms: BTreeMap<IndexSet, BigInt>,
}

impl MultiVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        MultiVector { dim, degree, terms: BTreeMap::new() }
    }

    /// The degree-0 unit.
    pub fn one(dim: usize) -> Self {
        let mut w = Self::zero(dim, 0);
        w.terms.insert(Vec::new(), BigInt::one());
        w
    }

    /// Basis vector `e_i` (zero-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut w = Self::zero(dim, 1);
        w.terms.insert(vec![i], BigInt::one());
        w
    }

    pub fn from_vector(v: &IntVector) -> Self {
        let mut w = Self::zero(v.dim(), 1);
        for (i, c) in v.0.iter().enumerate() {
            w.set(vec![i], c.clone());
        }
        w
    }

    /// Build from `(indices, coefficient)` pairs; indices must be increasing.
    pub fn from_terms(dim: usize, degree: usize, terms: impl IntoIterator<Item = (IndexSet, BigInt)>) -> Result<Self> {
        let mut w = Self::zero(dim, degree);
        for (i, c) in terms {
            if i.len() != degree || i.windows(2).any(|p| p[0] >= p[1]) || i.iter().any(|&x| x >= dim) {
                return Err(Error::invalid("indices", format!("{i:?} is not an increasing {degree}-subset of 0..{dim}")));
            }
            let cur = w.coefficient(&i) + c;
            w.set(i, cur);
        }
        Ok(w)
    }

    fn set(&mut self, i: IndexSet, c: BigInt) {
        if c.is_zero() {
            self.terms.remove(&i);
        } else {
            self.terms.insert(i, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: &[usize]) -> BigInt {
        self.terms.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &MultiVector) -> Result<MultiVector> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::invalid("multivector", "shape mismatch in sum"));
        }
        let mut w = self.clone();
        for (i, c) in &other.terms {
            let cur = w.coefficient(i) + c;
            w.set(i.clone(), cur);
        }
        Ok(w)
    }

    pub fn scale(&self, k: &BigInt) -> MultiVector {
        let mut w = Self::zero(self.dim, self.degree);
        for (i, c) in &self.terms {
            w.set(i.clone(), c * k);
        }
        w
    }

    pub fn norm_sq(&self) -> BigInt {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Alternating product.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        if self.dim != other.dim {
            return Err(Error::invalid("multivector", "ambient dimensions differ"));
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::invalid("degree", format!("{degree} exceeds the ambient dimension {}", self.dim)));
        }
        let mut w = Self::zero(self.dim, degree);
        for (i, a) in &self.terms {
            for (k, b) in &other.terms {
                if i.iter().any(|x| k.contains(x)) {
                    continue;
                }
                let inversions: usize = i.iter().map(|x| k.iter().filter(|y| *y < x).count()).sum();
                let mut m: IndexSet = i.iter().chain(k).copied().collect();
                m.sort_unstable();
                let c = a * b * parity(inversions);
                let cur = w.coefficient(&m) + c;
                w.set(m, cur);
            }
        }
        Ok(w)
    }
}

impl Serialize for MultiVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Term {
            indices: Vec<usize>,
            coeff: String,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(i, c)| Term { indices: i.iter().map(|x| x + 1).collect(), coeff: c.to_string() })
            .collect();
        let mut st = s.serialize_struct("MultiVector", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// `c(w)_i[J] = (-1)^{#{j in J : j < i}} w[{i} u J]` for `J` inside the first
/// `n` coordinates, `i` over all `n + 1`.
pub fn c_of_w(w: &MultiVector) -> Result<Vec<MultiVector>> {
    let d = w.dim;
    if w.degree == 0 {
        return Err(Error::invalid("degree", "c(w) needs degree at least 1"));
    }
    let mut out = vec![MultiVector::zero(d, w.degree - 1); d];
    for (idx, c) in &w.terms {
        for (pos, &i) in idx.iter().enumerate() {
            let j: IndexSet = idx.iter().copied().filter(|&x| x != i).collect();
            if j.contains(&(d - 1)) {
                continue;
            }
            out[i].set(j, c * parity(pos));
        }
    }
    Ok(out)
}

fn check_a(a: &RealVector, w: &MultiVector) -> Result<()> {
    if a.dim() + 1 != w.dim {
        return Err(Error::invalid("a", format!("length {} for ambient dimension {}", a.dim(), w.dim)));
    }
    Ok(())
}

/// Coordinates of `R_0 c(w)`: row `r` is `a_r c(w)_1 + c(w)_{r+1}`, listed
/// over all index sets `J` met in `c(w)`.
fn r0_c_rows(a: &RealVector, w: &MultiVector) -> Result<Vec<Scalar>> {
    check_a(a, w)?;
    let c = c_of_w(w)?;
    let mut js: Vec<&IndexSet> = c.iter().flat_map(|m| m.terms.keys()).collect();
    js.sort();
    js.dedup();
    let mut out = Vec::new();
    for (r, ar) in a.0.iter().enumerate() {
        for j in &js {
            let first = Scalar::from_bigint(c[0].coefficient(j));
            let next = Scalar::from_bigint(c[r + 1].coefficient(j));
            out.push(&(ar * &first) + &next);
        }
    }
    Ok(out)
}

/// `||R_0 c(w)||^2`, exact when `a` is.
pub fn r0_c_norm_sq(a: &RealVector, w: &MultiVector) -> Result<Scalar> {
    Ok(r0_c_rows(a, w)?.iter().fold(Scalar::int(0), |acc, x| &acc + &(x * x)))
}

/// `||R_0 c(w)||`.
pub fn r0_c_norm(a: &RealVector, w: &MultiVector) -> Result<PrecisionReal> {
    let bits = a.bits().unwrap_or(DEFAULT_MANTISSA_BITS);
    r0_c_norm_sq(a, w)?.to_real(bits).sqrt()
}

/// One coefficient of `g_t u_y w`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionTerm {
    /// One-based indices; `expanding` terms carry `e_{n+1}` as well.
    pub indices: Vec<usize>,
    pub expanding: bool,
    pub value: LogValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowExpansion {
    pub terms: Vec<ExpansionTerm>,
}

impl FlowExpansion {
    /// Coefficient of `e_K` for a zero-based index set `K`.
    pub fn coefficient(&self, k: &[usize], n: usize) -> Option<&LogValue> {
        let expanding = k.last() == Some(&n);
        let body: Vec<usize> = k.iter().filter(|&&x| x != n).map(|x| x + 1).collect();
        self.terms.iter().find(|t| t.expanding == expanding && t.indices == body).map(|t| &t.value)
    }

    pub fn norm_sq(&self, bits: usize) -> PrecisionReal {
        self.terms.iter().fold(PrecisionReal::zero(bits), |acc, t| {
            let v = t.value.to_real().with_bits(bits);
            acc + &v * &v
        })
    }
}

fn subsets_of(n: usize, k: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSet>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Expand `g_t u_y w` over the orthogonal families `e_I` and `e_J ^ e_{n+1}`
/// with `I, J` inside the first `n` coordinates.
pub fn flow_expansion(w: &MultiVector, y: &RealVector, t: &FlowVector) -> Result<FlowExpansion> {
    let n = y.dim();
    let j = w.degree;
    if w.dim != n + 1 || t.dim() != n {
        return Err(Error::invalid("w", "dimension mismatch"));
    }
    if j == 0 || j > n {
        return Err(Error::invalid("degree", format!("{j} is outside 1..={n}")));
    }
    let bits = y.bits().unwrap_or(DEFAULT_MANTISSA_BITS).max(t.total().mantissa_bits());
    let ts = t.components();
    let total = t.total();
    let c = c_of_w(w)?;
    let mut terms = Vec::new();
    for i in subsets_of(n, j) {
        let coeff = w.coefficient(&i);
        let shift = i.iter().fold(PrecisionReal::zero(bits), |acc, &k| acc - &ts[k]);
        let v = LogValue::from_scalar(&Scalar::from_bigint(coeff), bits).scale_exp(&shift);
        terms.push(ExpansionTerm { indices: i.iter().map(|x| x + 1).collect(), expanding: false, value: v });
    }
    let sign = parity(j - 1);
    for jj in subsets_of(n, j - 1) {
        let mut s = Scalar::from_bigint(c[n].coefficient(&jj));
        for (i, yi) in y.0.iter().enumerate() {
            let ci = c[i].coefficient(&jj);
            if !ci.is_zero() {
                s = &s + &(yi * &Scalar::from_bigint(ci));
            }
        }
        if sign < 0 {
            s = -&s;
        }
        let shift = jj.iter().fold(total.clone(), |acc, &k| acc - &ts[k]);
        let v = LogValue::from_scalar(&s, bits).scale_exp(&shift);
        terms.push(ExpansionTerm { indices: jj.iter().map(|x| x + 1).collect(), expanding: true, value: v });
    }
    Ok(FlowExpansion { terms })
}

fn det_real(m: Vec<Vec<PrecisionReal>>) -> PrecisionReal {
    crate::lattice::determinant(&m)
}

/// `(wedge^j M) w` through `j x j` minors: the coefficient at `K` is
/// `sum_I det M[K, I] w_I`. Rows of `m` are output coordinates.
pub fn exterior_power_action(m: &[Vec<PrecisionReal>], w: &MultiVector) -> Vec<(IndexSet, PrecisionReal)> {
    let d = w.dim;
    let bits = m[0][0].mantissa_bits();
    subsets_of(d, w.degree)
        .into_iter()
        .map(|k| {
            let mut acc = PrecisionReal::zero(bits);
            for (i, c) in &w.terms {
                let minor: Vec<Vec<PrecisionReal>> = k.iter().map(|&r| i.iter().map(|&s| m[r][s].clone()).collect()).collect();
                let det = if minor.is_empty() { PrecisionReal::one(bits) } else { det_real(minor) };
                acc = acc + &det * &PrecisionReal::from_bigint(c, bits);
            }
            (k, acc)
        })
        .collect()
}

/// Matrix of `g_t u_y`, rows as output coordinates.
pub fn flow_matrix(y: &RealVector, t: &FlowVector, bits: usize) -> Vec<Vec<PrecisionReal>> {
    let n = y.dim();
    let mut m = vec![vec![PrecisionReal::zero(bits); n + 1]; n + 1];
    let ts = t.components();
    for i in 0..n {
        m[i][i] = (-&ts[i]).with_bits(bits).exp();
    }
    let et = t.total().with_bits(bits).exp();
    for (i, yi) in y.0.iter().enumerate() {
        m[n][i] = &yi.to_real(bits) * &et;
    }
    m[n][n] = et;
    m
}

/// Nonzero integer multivector of degree `j >= 2` with entries in
/// `[-b, b]` and `||R_0 c(w)|| < 1`.
#[derive(Clone, Debug, Serialize)]
pub struct Rank2Violation {
    pub w: MultiVector,
    pub norm_sq: Scalar,
}

/// Exhaustive search for counterexamples to `||R_0 c(w)|| >= 1` in degree
/// `j >= 2`. Candidates are screened in `f64` and confirmed exactly.
pub fn check_rank2_bound(a: &RealVector, j: usize, coeff_bound: u32) -> Result<Vec<Rank2Violation>> {
    let n = a.dim();
    if j < 2 || j > n + 1 {
        return Err(Error::invalid("j", format!("need 2 <= j <= {}", n + 1)));
    }
    let sets = subsets_of(n + 1, j);
    let side = 2 * coeff_bound as u64 + 1;
    let total = (side as f64).powi(sets.len() as i32);
    if coeff_bound > 3 || n > 4 || total > 1e9 {
        return Err(Error::budget("multivector box", total, 1e9));
    }
    // column s of the linear map w -> R_0 c(w), on the unit multivector e_{sets[s]}
    let cols: Vec<Vec<f64>> = sets
        .iter()
        .map(|s| {
            let e = MultiVector::from_terms(n + 1, j, [(s.clone(), BigInt::one())]).expect("valid index set");
            rows_for(a, &e, n, j).iter().map(Scalar::to_f64).collect()
        })
        .collect();
    let dim = cols[0].len();
    let b = coeff_bound as i64;
    let lead: Vec<i64> = (-b..=b).collect();
    let found: Vec<Vec<i64>> = lead
        .par_iter()
        .flat_map_iter(|&first| {
            let mut hits = Vec::new();
            let mut coeffs = vec![-b; sets.len()];
            coeffs[0] = first;
            let rest = side.pow(sets.len() as u32 - 1);
            for _ in 0..rest {
                if coeffs.iter().any(|&c| c != 0) {
                    let mut s = 0.0;
                    for r in 0..dim {
                        let v: f64 = coeffs.iter().zip(&cols).map(|(&c, col)| c as f64 * col[r]).sum();
                        s += v * v;
                    }
                    if s < 1.0 + 1e-6 {
                        hits.push(coeffs.clone());
                    }
                }
                for c in coeffs.iter_mut().skip(1) {
                    if *c < b {
                        *c += 1;
                        break;
                    }
                    *c = -b;
                }
            }
            hits
        })
        .collect();
    let mut out = Vec::new();
    for coeffs in found {
        let w = MultiVector::from_terms(n + 1, j, sets.iter().cloned().zip(coeffs.into_iter().map(BigInt::from)))?;
        let norm_sq = r0_c_norm_sq(a, &w)?;
        if norm_sq.cmp_value(&Scalar::int(1)).is_lt() {
            out.push(Rank2Violation { w, norm_sq });
        }
    }
    Ok(out)
}

/// Coefficients of one randomly drawn hyperplane in an exhaustion run.
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionCase {
    pub case: usize,
    pub a: Vec<String>,
    pub found: Vec<Rank2Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionSummary {
    pub n: usize,
    pub degrees: Vec<usize>,
    pub coeff_bound: u32,
    pub seed: u64,
    pub multivectors_per_case: u64,
    /// Total over all cases.
    pub violations: usize,
    pub cases: Vec<ExhaustionCase>,
}

/// Random rational coefficients `num/den` with `|num| <= 40`, `1 <= den <= 13`.
pub fn random_rational_coeffs(rng: &mut ChaCha8Rng, n: usize) -> RealVector {
    RealVector((0..n).map(|_| Scalar::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=13))).collect())
}

/// Run [`check_rank2_bound`] over `cases` seeded random rational `a` and
/// every listed degree.
pub fn exhaust_random(n: usize, degrees: &[usize], coeff_bound: u32, cases: usize, seed: u64) -> Result<ExhaustionSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 2 * coeff_bound as u64 + 1;
    let per_case = degrees.iter().map(|&j| side.pow(subsets_of(n + 1, j).len() as u32) - 1).sum();
    let mut out = Vec::with_capacity(cases);
    for case in 0..cases {
        let a = random_rational_coeffs(&mut rng, n);
        let mut violations = Vec::new();
        for &j in degrees {
            violations.extend(check_rank2_bound(&a, j, coeff_bound)?);
        }
        out.push(ExhaustionCase { case, a: a.render(), found: violations });
    }
    Ok(ExhaustionSummary {
        n,
        degrees: degrees.to_vec(),
        coeff_bound,
        seed,
        multivectors_per_case: per_case,
        violations: out.iter().map(|c| c.found.len()).sum(),
        cases: out,
    })
}

/// `R_0 c(w)` listed over every `J` of order `j - 1`, so columns line up.
fn rows_for(a: &RealVector, w: &MultiVector, n: usize, j: usize) -> Vec<Scalar> {
    let c = c_of_w(w).expect("degree at least 2");
    let js = subsets_of(n, j - 1);
    let mut out = Vec::with_capacity(n * js.len());
    for (r, ar) in a.0.iter().enumerate() {
        for jj in &js {
            let first = Scalar::from_bigint(c[0].coefficient(jj));
            let next = Scalar::from_bigint(c[r + 1].coefficient(jj));
            out.push(&(ar * &first) + &next);
        }
    }
    out
}

/// A degree-one `w` breaking `max(e^{-t_i}|p_i|, e^t ||R_0 c(w)||) >= e^{-dt}`.
/// Empirical constant in `sup_x ||g_t u_{f(x)} w|| ~ max_K sup_x |coefficient_K(x)|`
/// over `samples` evenly spaced parameters. Always in `[1, sqrt(#terms)]`;
/// `None` when every coefficient vanishes on the grid.
pub fn compare_ratio(f: &PolyMap, interval: (f64, f64), w: &MultiVector, t: &FlowVector, samples: usize) -> Result<Option<f64>> {
    if samples < 2 {
        return Err(Error::invalid("samples", "need at least 2"));
    }
    if !(interval.0.is_finite() && interval.1.is_finite() && interval.0 < interval.1) {
        return Err(Error::invalid("interval", "need finite a < b"));
    }
    let lo = BigRational::from_float(interval.0).expect("finite");
    let width = BigRational::from_float(interval.1 - interval.0).expect("finite");
    let mut best_norm = f64::NEG_INFINITY;
    let mut best_term: Vec<f64> = Vec::new();
    for k in 0..samples {
        let x = Scalar::Exact(&lo + &width * BigRational::new(BigInt::from(k), BigInt::from(samples - 1)));
        let e = flow_expansion(w, &RealVector(f.eval(&x)), t)?;
        let logs: Vec<f64> = e.terms.iter().map(|term| term.value.log_f64()).collect();
        if best_term.is_empty() {
            best_term = vec![f64::NEG_INFINITY; logs.len()];
        }
        for (b, &l) in best_term.iter_mut().zip(&logs) {
            *b = b.max(l);
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top.is_finite() {
            let s: f64 = logs.iter().map(|&l| (2.0 * (l - top)).exp()).sum();
            best_norm = best_norm.max(top + 0.5 * s.ln());
        }
    }
    let top = best_term.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(top.is_finite().then(|| (best_norm - top).exp()))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquiViolation {
    pub w: IntVector,
    /// Log of the left-hand maximum.
    pub log_max: f64,
    /// `-d t`.
    pub log_bound: f64,
    /// `(n + n d) / (1 - k d)`: a lower bound for the exponent of points on
    /// the hyperplane when such `w` recur along unbounded `t`.
    pub implied_v: f64,
    /// Found by enumeration (`false`: from continued-fraction candidates).
    pub from_enumeration: bool,
}

fn equi_value(a: &[PrecisionReal], t: &[PrecisionReal], total: &PrecisionReal, w: &[BigInt], bits: usize) -> PrecisionReal {
    let n = a.len();
    let p1 = PrecisionReal::from_bigint(&w[0], bits);
    let mut m = PrecisionReal::zero(bits);
    for i in 0..n {
        let v = (&PrecisionReal::from_bigint(&w[i], bits) * &(-&t[i]).exp()).abs();
        m = m.max(v);
    }
    let mut r = PrecisionReal::zero(bits);
    for (k, ak) in a.iter().enumerate() {
        let v = &(ak * &p1) + &PrecisionReal::from_bigint(&w[k + 1], bits);
        r = r + &v * &v;
    }
    let r = r.sqrt().expect("non-negative") * total.exp();
    m.max(r)
}

/// Look for a degree-one violation of the flow inequality at `t` and rate
/// `d`: lattice enumeration of `w -> (e^{-t_i} p_i, e^t R_0 c(w))` within the
/// implied radius, plus `w = (q, -round(a_1 q), ..., -round(a_n q))` for
/// continued-fraction denominators `q` of `a_n`.
pub fn condition_equi_search(
    a: &RealVector,
    d: f64,
    k: usize,
    t: &FlowVector,
    node_budget: u64,
) -> Result<Option<EquiViolation>> {
    let n = a.dim();
    if t.dim() != n || k == 0 || k > n {
        return Err(Error::invalid("t", "dimension mismatch or k outside 1..=n"));
    }
    if !(0.0..1.0 / k as f64).contains(&d) {
        return Err(Error::invalid("d", format!("{d} is outside [0, 1/k)")));
    }
    let total_f = t.total().to_f64();
    let count = t.components().iter().filter(|x| x.to_f64() >= d * total_f).count();
    if count < k {
        return Err(Error::invalid("t", format!("t_i >= dt holds for {count} indices, need {k}")));
    }
    let bits = ((2.0 * total_f / std::f64::consts::LN_2) as usize + 128).max(DEFAULT_MANTISSA_BITS);
    let ar: Vec<PrecisionReal> = a
        .0
        .iter()
        .map(|x| match x {
            Scalar::Exact(r) => PrecisionReal::from_rational(r, bits),
            Scalar::Real(v) => v.with_bits(bits),
        })
        .collect();
    let ts: Vec<PrecisionReal> = t.components().iter().map(|x| x.with_bits(bits)).collect();
    let total = t.total().with_bits(bits);
    let dt = &PrecisionReal::from_f64(d, 64)?.with_bits(bits) * &total;
    let bound = (-&dt).exp();
    let implied_v = n as f64 * (1.0 + d) / (1.0 - k as f64 * d);

    let mut best: Option<(PrecisionReal, Vec<BigInt>, bool)> = None;
    let consider = |w: Vec<BigInt>, from_enum: bool, best: &mut Option<(PrecisionReal, Vec<BigInt>, bool)>| {
        if w.iter().all(Zero::is_zero) {
            return;
        }
        let v = equi_value(&ar, &ts, &total, &w, bits);
        if v < bound {
            let replace = match best {
                None => true,
                Some((b, bw, _)) => v < *b || (v == *b && w < *bw),
            };
            if replace {
                *best = Some((v, w, from_enum));
            }
        }
    };

    // columns: images of the unit vectors of Z^{n+1} in R^{2n}
    let et = total.exp();
    let mut cols = vec![vec![PrecisionReal::zero(bits); 2 * n]; n + 1];
    for i in 0..n {
        cols[i][i] = (-&ts[i]).exp();
    }
    for r in 0..n {
        cols[0][n + r] = &ar[r] * &et;
        cols[r + 1][n + r] = &cols[r + 1][n + r] + &et;
    }
    let red = lll(cols)?;
    let slots = PrecisionReal::from_i64(2 * n as i64, bits);
    let radius = &slots * &(&bound * &bound);
    let mut hits: Vec<Vec<BigInt>> = Vec::new();
    enumerate(&red, &[], radius, node_budget, &mut |c, _| {
        hits.push(c.to_vec());
        None
    })?;
    for w in hits {
        let w = crate::lattice::sign_normalised(&w);
        consider(w, true, &mut best);
    }

    if let Some(last) = a.0.last() {
        let exact = match last {
            Scalar::Exact(r) => r.abs(),
            Scalar::Real(v) => v.to_rational().abs(),
        };
        if let Ok(cf) = cf_expand(&exact) {
            let cap = BigInt::from(2).pow((total_f / std::f64::consts::LN_2) as u32 + 2);
            for (_, q) in cf.convergents.iter().take_while(|(_, q)| q <= &cap) {
                let q = if last.signum() < 0 { -q } else { q.clone() };
                let mut w = vec![q.clone()];
                for x in &ar {
                    w.push(-(x * &PrecisionReal::from_bigint(&q, bits)).round_half_even());
                }
                consider(crate::lattice::sign_normalised(&w), false, &mut best);
            }
        }
    }

    Ok(best.map(|(v, w, from_enumeration)| EquiViolation {
        w: IntVector(w),
        log_max: LogValue::from_real(&v).log_f64(),
        log_bound: -dt.to_f64(),
        implied_v,
        from_enumeration,
    }))
}

#[cfg(test)]
mod tests;
