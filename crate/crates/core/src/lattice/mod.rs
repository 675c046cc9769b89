//! Unimodular lattices `u_y Z^{n+1}`, the diagonal flow and shortest vectors.

mod field;
mod reduce;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use field::Field;
pub use reduce::{enumerate, enumerate_min, gram_schmidt, lll, sign_normalised, MinVector, Reduced, LLL_DELTA};

use crate::error::{Error, Result};
use crate::numerics::{IntVector, LogValue, PrecisionReal, RealVector, Scalar, DEFAULT_MANTISSA_BITS, MIN_MANTISSA_BITS};

/// Largest dimension accepted by the shortest-vector search.
pub const MAX_DIMENSION: usize = 8;

/// Node limit for a single enumeration.
pub const NODE_BUDGET: u64 = 50_000_000;

/// Determinant by Gaussian elimination with largest-pivot selection.
pub fn determinant<T: Field>(columns: &[Vec<T>]) -> T {
    let n = columns.len();
    let like = columns[0][0].clone();
    let mut m: Vec<Vec<T>> = columns.to_vec();
    let mut det = T::from_int(1, &like);
    for c in 0..n {
        let pivot = (c..n)
            .filter(|&r| !m[r][c].is_zero())
            .max_by(|&a, &b| m[a][c].to_f64().abs().total_cmp(&m[b][c].to_f64().abs()));
        let Some(p) = pivot else {
            return T::from_int(0, &like);
        };
        if p != c {
            m.swap(p, c);
            det = T::from_int(0, &like).sub(&det);
        }
        det = det.mul(&m[c][c]);
        for r in c + 1..n {
            let f = m[r][c].div(&m[c][c]);
            for j in c..n {
                let t = f.mul(&m[c][j]);
                m[r][j] = m[r][j].sub(&t);
            }
        }
    }
    det
}

/// A square basis whose columns generate a lattice of covolume one.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeBasis {
    columns: Vec<Vec<Scalar>>,
}

impl LatticeBasis {
    /// Columns are basis vectors. Exact bases must have determinant exactly
    /// `±1`; float bases within `2^{-bits/2}`.
    pub fn new(columns: Vec<Vec<Scalar>>) -> Result<Self> {
        let d = columns.len();
        if d == 0 || columns.iter().any(|c| c.len() != d) {
            return Err(Error::invalid("basis", "expected a nonempty square matrix"));
        }
        let b = LatticeBasis { columns };
        let det = b.determinant();
        let ok = match &det {
            Scalar::Exact(r) => r.abs().is_one(),
            Scalar::Real(x) => {
                let dev = (x.abs() - PrecisionReal::one(x.mantissa_bits())).abs();
                dev.is_zero() || dev.to_f64().log2() <= -(x.mantissa_bits() as f64) / 2.0
            }
        };
        if !ok {
            return Err(Error::invalid("basis", format!("determinant {} is not ±1", det.render())));
        }
        Ok(b)
    }

    pub fn dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<Scalar>] {
        &self.columns
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.columns[col][row]
    }

    pub fn is_exact(&self) -> bool {
        self.columns.iter().flatten().all(Scalar::is_exact)
    }

    /// Widest float entry, or the default width for exact bases.
    pub fn bits(&self) -> usize {
        self.columns.iter().flatten().filter_map(Scalar::bits).max().unwrap_or(DEFAULT_MANTISSA_BITS)
    }

    pub fn determinant(&self) -> Scalar {
        if let Some(cols) = self.exact_columns() {
            Scalar::Exact(determinant(&cols))
        } else {
            Scalar::Real(determinant(&self.real_columns(self.bits())))
        }
    }

    pub fn exact_columns(&self) -> Option<Vec<Vec<BigRational>>> {
        self.columns.iter().map(|c| c.iter().map(|x| x.as_exact().cloned()).collect()).collect()
    }

    pub fn real_columns(&self, bits: usize) -> Vec<Vec<PrecisionReal>> {
        self.columns.iter().map(|c| c.iter().map(|x| x.to_real(bits)).collect()).collect()
    }
}

/// The basis `(I_n 0; y 1)`: column `i < n` is `e_i + y_i e_{n+1}`.
pub fn u_of_y(y: &RealVector) -> LatticeBasis {
    let n = y.dim();
    let mut columns = vec![vec![Scalar::int(0); n + 1]; n + 1];
    for (i, col) in columns.iter_mut().enumerate() {
        col[i] = Scalar::int(1);
        if i < n {
            col[n] = y.0[i].clone();
        }
    }
    LatticeBasis { columns }
}

/// Non-negative flow parameters `t_1, ..., t_n` with total `t`.
#[derive(Clone, Debug)]
pub struct FlowVector {
    t: Vec<PrecisionReal>,
}

impl FlowVector {
    pub fn new(t: Vec<PrecisionReal>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::invalid("t", "empty flow"));
        }
        if let Some(i) = t.iter().position(|x| x.signum() < 0) {
            return Err(Error::invalid("t", format!("component {} is negative", i + 1)));
        }
        Ok(FlowVector { t })
    }

    pub fn from_f64(t: &[f64]) -> Result<Self> {
        let t = t.iter().map(|&x| PrecisionReal::from_f64(x, DEFAULT_MANTISSA_BITS)).collect::<Result<_>>()?;
        Self::new(t)
    }

    pub fn from_ints(t: &[u64]) -> Self {
        FlowVector { t: t.iter().map(|&x| PrecisionReal::from_i128(x as i128, DEFAULT_MANTISSA_BITS)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn components(&self) -> &[PrecisionReal] {
        &self.t
    }

    pub fn total(&self) -> PrecisionReal {
        let bits = self.t.iter().map(PrecisionReal::mantissa_bits).max().unwrap_or(DEFAULT_MANTISSA_BITS);
        self.t.iter().fold(PrecisionReal::zero(bits), |a, b| a + b)
    }

    /// Log scaling of coordinate `row`: `-t_row` for `row < n`, `t` for the last.
    pub fn log_scale(&self, row: usize) -> PrecisionReal {
        if row < self.t.len() {
            -&self.t[row]
        } else {
            self.total()
        }
    }
}

impl Serialize for FlowVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FlowVector", 2)?;
        let t: Vec<String> = self.t.iter().map(|x| x.to_decimal_string(12)).collect();
        st.serialize_field("t", &t)?;
        st.serialize_field("total", &self.total().to_decimal_string(12))?;
        st.end()
    }
}

/// `g_t` applied to a basis, held entrywise as sign and log-magnitude.
#[derive(Clone, Debug)]
pub struct FlowedLattice {
    base: LatticeBasis,
    flow: FlowVector,
    entries: Vec<Vec<LogValue>>,
}

/// Scale row `i < n` by `e^{-t_i}` and the last row by `e^t`.
pub fn apply_flow(b: &LatticeBasis, t: &FlowVector) -> Result<FlowedLattice> {
    if b.dimension() != t.dim() + 1 {
        return Err(Error::invalid("t", format!("flow of length {} for dimension {}", t.dim(), b.dimension())));
    }
    let bits = working_bits(t);
    let entries = b
        .columns
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(r, x)| LogValue::from_real(&at_bits(x, bits)).scale_exp(&t.log_scale(r).with_bits(bits)))
                .collect()
        })
        .collect();
    Ok(FlowedLattice { base: b.clone(), flow: t.clone(), entries })
}

/// Width that resolves the largest and smallest scalings against each other
/// with 128 bits to spare.
fn working_bits(t: &FlowVector) -> usize {
    let span = t.total().to_f64();
    ((2.0 * span / std::f64::consts::LN_2) as usize + 128).max(MIN_MANTISSA_BITS)
}

/// `x` rounded (or widened) to exactly `bits`.
fn at_bits(x: &Scalar, bits: usize) -> PrecisionReal {
    match x {
        Scalar::Exact(r) => PrecisionReal::from_rational(r, bits),
        Scalar::Real(v) => v.with_bits(bits),
    }
}

impl FlowedLattice {
    pub fn base(&self) -> &LatticeBasis {
        &self.base
    }

    pub fn flow(&self) -> &FlowVector {
        &self.flow
    }

    pub fn entries(&self) -> &[Vec<LogValue>] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    /// Sum of the row log scalings; zero up to rounding.
    pub fn log_det_shift(&self) -> PrecisionReal {
        let d = self.dimension();
        (0..d).fold(PrecisionReal::zero(self.flow.total().mantissa_bits()), |a, r| a + self.flow.log_scale(r))
    }

    /// Working width: input wider than this is rounded to it.
    pub fn working_bits(&self) -> usize {
        working_bits(&self.flow)
    }

    /// Entries multiplied out at the given width.
    pub fn real_columns(&self, bits: usize) -> Vec<Vec<PrecisionReal>> {
        let scales: Vec<PrecisionReal> = (0..self.dimension()).map(|r| self.flow.log_scale(r).with_bits(bits).exp()).collect();
        self.base
            .columns
            .iter()
            .map(|c| c.iter().zip(&scales).map(|(x, s)| &at_bits(x, bits) * s).collect())
            .collect()
    }
}

/// A shortest nonzero vector with its coefficients in the input basis.
#[derive(Clone, Debug, Serialize)]
pub struct ShortestVector {
    pub coeffs: IntVector,
    pub vector: Vec<Scalar>,
    pub length_sq: Scalar,
    pub length_log: f64,
}

impl ShortestVector {
    pub fn length(&self) -> f64 {
        self.length_log.exp()
    }
}

/// Lattices with a certified shortest-vector search.
pub trait Lattice {
    fn dimension(&self) -> usize;
    fn shortest_vector(&self) -> Result<ShortestVector>;
}

fn check_dimension(d: usize) -> Result<()> {
    if d > MAX_DIMENSION {
        return Err(Error::invalid("dimension", format!("{d} exceeds the enumeration limit {MAX_DIMENSION}")));
    }
    Ok(())
}

fn finish<T: Field>(m: MinVector<T>, wrap: impl Fn(T) -> Scalar) -> ShortestVector {
    let length_sq = wrap(m.norm_sq);
    let bits = length_sq.bits().unwrap_or(DEFAULT_MANTISSA_BITS);
    let length_log = LogValue::from_scalar(&length_sq, bits).log_f64() / 2.0;
    ShortestVector {
        coeffs: IntVector(m.coeffs),
        vector: m.vector.into_iter().map(&wrap).collect(),
        length_sq,
        length_log,
    }
}

fn svp<T: Field>(columns: Vec<Vec<T>>) -> Result<MinVector<T>> {
    let red = lll(columns)?;
    enumerate_min(&red, &[], None, NODE_BUDGET)?.ok_or_else(|| Error::domain("empty enumeration"))
}

impl Lattice for LatticeBasis {
    fn dimension(&self) -> usize {
        self.columns.len()
    }

    fn shortest_vector(&self) -> Result<ShortestVector> {
        check_dimension(self.dimension())?;
        match self.exact_columns() {
            Some(cols) => Ok(finish(svp(cols)?, Scalar::Exact)),
            None => Ok(finish(svp(self.real_columns(self.bits()))?, Scalar::Real)),
        }
    }
}

impl Lattice for FlowedLattice {
    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn shortest_vector(&self) -> Result<ShortestVector> {
        check_dimension(self.dimension())?;
        Ok(finish(svp(self.real_columns(self.working_bits()))?, Scalar::Real))
    }
}

pub fn shortest_vector(l: &impl Lattice) -> Result<ShortestVector> {
    l.shortest_vector()
}

/// Whether every nonzero vector has length at least `eps`.
pub fn in_k_eps(l: &impl Lattice, eps: &Scalar) -> Result<bool> {
    if eps.signum() <= 0 {
        return Err(Error::invalid("eps", "must be positive"));
    }
    let s = l.shortest_vector()?;
    Ok(s.length_sq.cmp_value(&(eps * eps)).is_ge())
}

/// A vector of `g_t u_y Z^{n+1}` whose `q` part has a prescribed support.
#[derive(Clone, Debug, Serialize)]
pub struct StratumVector {
    pub q: IntVector,
    #[serde(serialize_with = "crate::numerics::serialize_display")]
    pub p: BigInt,
    /// `<q, y> + p`, exact when `y` is.
    pub x: Scalar,
    /// Log of the sup norm of the flowed vector.
    pub sup_log: f64,
}

/// Smallest sup norm over flowed vectors `(e^{-t_i} q_i, e^t(<q,y> + p))`
/// with `q_i != 0` exactly for `i` in `support`, searched up to sup norm
/// `e^{log_bound}`.
pub fn stratum_min_sup(
    y: &RealVector,
    flow: &FlowVector,
    support: &[usize],
    log_bound: f64,
) -> Result<Option<StratumVector>> {
    let n = y.dim();
    if flow.dim() != n || support.is_empty() || support.iter().any(|&i| i >= n) {
        return Err(Error::invalid("support", "indices must lie in 1..=n"));
    }
    let k = support.len();
    let fl = FlowedLattice { base: u_of_y(y), flow: flow.clone(), entries: Vec::new() };
    let bits = fl.working_bits();
    let full = fl.real_columns(bits);
    let rows: Vec<usize> = support.iter().copied().chain(std::iter::once(n)).collect();
    let cols: Vec<Vec<PrecisionReal>> =
        rows.iter().map(|&c| rows.iter().map(|&r| full[c][r].clone()).collect()).collect();
    let red = lll(cols)?;
    let bound = PrecisionReal::from_f64(log_bound, 64)?.widen(bits).exp();
    let slots = PrecisionReal::from_i64(k as i64 + 1, bits);
    let mut best: Option<(PrecisionReal, Vec<BigInt>)> = None;
    let sub_support: Vec<usize> = (0..k).collect();
    enumerate(&red, &sub_support, &slots * &(&bound * &bound), NODE_BUDGET, &mut |c, _| {
        let v = red.combine(c);
        let sup = v.iter().map(PrecisionReal::abs).max().expect("nonempty");
        if sup > bound {
            return None;
        }
        let c = sign_normalised(c);
        let better = match &best {
            None => true,
            Some((b, bc)) => sup < *b || (sup == *b && c < *bc),
        };
        if better {
            let r = &slots * &(&sup * &sup);
            best = Some((sup, c));
            Some(r)
        } else {
            None
        }
    })?;
    let Some((sup, c)) = best else { return Ok(None) };
    let mut q = vec![BigInt::zero(); n];
    for (s, &i) in support.iter().enumerate() {
        q[i] = c[s].clone();
    }
    let p = c[k].clone();
    let q = IntVector(q);
    let x = &y.dot(&q)? + &Scalar::from_bigint(p.clone());
    Ok(Some(StratumVector { q, p, x, sup_log: LogValue::from_real(&sup).log_f64() }))
}
