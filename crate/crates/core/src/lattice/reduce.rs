//! LLL reduction and Schnorr–Euchner enumeration over a generic field.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::field::Field;
use crate::error::{Error, Result};

/// Lovász constant.
pub const LLL_DELTA: (i128, i128) = (99, 100);

/// A reduced basis with its Gram–Schmidt data and the integer transform
/// `reduced[j] = sum_i u[j][i] * original[i]`.
#[derive(Clone, Debug)]
pub struct Reduced<T: Field> {
    pub original: Vec<Vec<T>>,
    pub basis: Vec<Vec<T>>,
    pub u: Vec<Vec<BigInt>>,
    pub mu: Vec<Vec<T>>,
    pub bstar: Vec<T>,
}

fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    let mut acc = T::from_int(0, &a[0]);
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

/// Gram–Schmidt coefficients of linearly independent vectors.
pub fn gram_schmidt<T: Field>(basis: &[Vec<T>]) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let k = basis.len();
    let zero = T::from_int(0, &basis[0][0]);
    let mut star: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut mu = vec![vec![zero.clone(); k]; k];
    let mut bstar = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = basis[i].clone();
        for j in 0..i {
            let m = dot(&basis[i], &star[j]).div(&bstar[j]);
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi = vi.sub(&m.mul(sj));
            }
            mu[i][j] = m;
        }
        let b = dot(&v, &v);
        if b.is_zero() {
            return Err(Error::domain("basis vectors are linearly dependent"));
        }
        bstar.push(b);
        star.push(v);
    }
    Ok((mu, bstar))
}

/// LLL-reduce the given independent vectors.
pub fn lll<T: Field>(basis: Vec<Vec<T>>) -> Result<Reduced<T>> {
    let k = basis.len();
    let like = basis[0][0].clone();
    let (mu, bstar) = gram_schmidt(&basis)?;
    let mut r = Reduced {
        original: basis.clone(),
        basis,
        u: (0..k).map(|i| (0..k).map(|j| BigInt::from(u8::from(i == j))).collect()).collect(),
        mu,
        bstar,
    };
    let delta = T::from_int(LLL_DELTA.0, &like).div(&T::from_int(LLL_DELTA.1, &like));
    let mut i = 1;
    let mut swaps = 0usize;
    while i < k {
        size_reduce(&mut r, i, i - 1)?;
        let m = &r.mu[i][i - 1];
        let lhs = r.bstar[i].clone();
        let rhs = delta.sub(&m.mul(m)).mul(&r.bstar[i - 1]);
        if lhs < rhs {
            swap(&mut r, i);
            swaps += 1;
            if swaps > 1_000_000 {
                return Err(Error::budget("lattice reduction", swaps as f64, 1e6));
            }
            i = (i - 1).max(1);
        } else {
            for l in (0..i - 1).rev() {
                size_reduce(&mut r, i, l)?;
            }
            i += 1;
        }
    }
    Ok(r)
}

fn size_reduce<T: Field>(r: &mut Reduced<T>, k: usize, l: usize) -> Result<()> {
    let q = r.mu[k][l].round();
    if q.is_zero() {
        return Ok(());
    }
    let like = r.mu[k][l].clone();
    let qf = T::from_bigint(&q, &like);
    let bl = r.basis[l].clone();
    for (x, y) in r.basis[k].iter_mut().zip(&bl) {
        *x = x.sub(&qf.mul(y));
    }
    let ul = r.u[l].clone();
    for (x, y) in r.u[k].iter_mut().zip(&ul) {
        *x -= &q * y;
    }
    for j in 0..l {
        let t = r.mu[l][j].clone();
        r.mu[k][j] = r.mu[k][j].sub(&qf.mul(&t));
    }
    r.mu[k][l] = r.mu[k][l].sub(&qf);
    Ok(())
}

fn swap<T: Field>(r: &mut Reduced<T>, k: usize) {
    let n = r.basis.len();
    r.basis.swap(k, k - 1);
    r.u.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = r.mu[k][j].clone();
        r.mu[k][j] = std::mem::replace(&mut r.mu[k - 1][j], t);
    }
    let m = r.mu[k][k - 1].clone();
    let b = r.bstar[k].add(&m.mul(&m).mul(&r.bstar[k - 1]));
    r.mu[k][k - 1] = m.mul(&r.bstar[k - 1]).div(&b);
    r.bstar[k] = r.bstar[k - 1].mul(&r.bstar[k]).div(&b);
    r.bstar[k - 1] = b;
    for i in k + 1..n {
        let t = r.mu[i][k].clone();
        r.mu[i][k] = r.mu[i][k - 1].sub(&m.mul(&t));
        r.mu[i][k - 1] = t.add(&r.mu[k][k - 1].mul(&r.mu[i][k]));
    }
}

/// Result of a minimum search.
#[derive(Clone, Debug)]
pub struct MinVector<T: Field> {
    /// Coefficients with respect to the original basis, first nonzero positive.
    pub coeffs: Vec<BigInt>,
    pub vector: Vec<T>,
    pub norm_sq: T,
}

impl<T: Field> Reduced<T> {
    /// `sum_i coeffs[i] * original[i]`.
    pub fn combine(&self, coeffs: &[BigInt]) -> Vec<T> {
        let like = &self.original[0][0];
        let mut v = vec![T::from_int(0, like); self.original[0].len()];
        for (c, b) in coeffs.iter().zip(&self.original) {
            if !c.is_zero() {
                let f = T::from_bigint(c, like);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = vi.add(&f.mul(bi));
                }
            }
        }
        v
    }
}

/// Euclidean-shortest nonzero vector whose coefficients are nonzero at every
/// index of `support`, searched within `radius_sq` (the first reduced vector
/// when `None`). Ties go to the lexicographically smallest coefficients.
pub fn enumerate_min<T: Field>(
    red: &Reduced<T>,
    support: &[usize],
    radius_sq: Option<T>,
    node_budget: u64,
) -> Result<Option<MinVector<T>>> {
    let radius = radius_sq.unwrap_or_else(|| red.bstar[0].clone());
    let mut best: Option<(T, Vec<BigInt>)> = None;
    enumerate(red, support, radius, node_budget, &mut |x, norm| {
        let c = sign_normalised(x);
        let better = match &best {
            None => true,
            Some((b, bc)) => norm < b || (norm == b && c < *bc),
        };
        if better {
            best = Some((norm.clone(), c));
            Some(norm.clone())
        } else {
            None
        }
    })?;
    Ok(best.map(|(norm_sq, coeffs)| MinVector { vector: red.combine(&coeffs), coeffs, norm_sq }))
}

/// Visit every nonzero lattice point with squared norm at most the current
/// radius whose coefficients are nonzero on `support`. The visitor receives
/// original-basis coefficients and the squared norm and may shrink the radius.
pub fn enumerate<T: Field>(
    red: &Reduced<T>,
    support: &[usize],
    radius_sq: T,
    node_budget: u64,
    visit: &mut dyn FnMut(&[BigInt], &T) -> Option<T>,
) -> Result<()> {
    let k = red.basis.len();
    let zero = T::from_int(0, &red.bstar[0]);
    // dead[l][s]: coefficient support[s] ignores reduced vectors 0..=l
    let dead = (0..k).map(|l| support.iter().map(|&i| (0..=l).all(|j| red.u[j][i].is_zero())).collect()).collect();
    let mut st = Search { red, support, dead, x: vec![0i128; k], radius: radius_sq, nodes: 0, node_budget, zero, visit };
    let z = st.zero.clone();
    st.level(k - 1, z)
}

struct Search<'a, T: Field> {
    red: &'a Reduced<T>,
    support: &'a [usize],
    dead: Vec<Vec<bool>>,
    x: Vec<i128>,
    radius: T,
    nodes: u64,
    node_budget: u64,
    zero: T,
    visit: &'a mut dyn FnMut(&[BigInt], &T) -> Option<T>,
}

fn overflow() -> Error {
    Error::Overflow("enumeration coordinate".into())
}

/// Flip the sign so that the first nonzero entry is positive.
pub fn sign_normalised(x: &[BigInt]) -> Vec<BigInt> {
    let neg = x.iter().find(|v| !v.is_zero()).is_some_and(|v| v.sign() == num_bigint::Sign::Minus);
    x.iter().map(|v| if neg { -v } else { v.clone() }).collect()
}

impl<T: Field> Search<'_, T> {
    fn coeffs(&self) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.x.len()];
        for (j, &xj) in self.x.iter().enumerate() {
            if xj != 0 {
                let xj = BigInt::from(xj);
                for (ci, uji) in c.iter_mut().zip(&self.red.u[j]) {
                    *ci += &xj * uji;
                }
            }
        }
        c
    }

    /// No point below level `l` satisfies the support condition.
    fn hopeless(&self, l: usize) -> bool {
        self.support.iter().enumerate().any(|(s, &i)| {
            self.dead[l][s]
                && (l + 1..self.x.len())
                    .fold(BigInt::zero(), |r, j| r + BigInt::from(self.x[j]) * &self.red.u[j][i])
                    .is_zero()
        })
    }

    fn level(&mut self, l: usize, above: T) -> Result<()> {
        if self.hopeless(l) {
            return Ok(());
        }
        let mut c = self.zero.clone();
        for j in l + 1..self.x.len() {
            if self.x[j] != 0 {
                c = c.sub(&self.red.mu[j][l].mul(&T::from_int(self.x[j], &self.zero)));
            }
        }
        let x0 = c.round().to_i128().ok_or_else(overflow)?;
        let up = T::from_int(x0, &self.zero) <= c;
        let mut step = 0i128;
        loop {
            // zigzag around the centre by nondecreasing distance
            let off = match step {
                0 => 0,
                s if (s % 2 == 1) == up => (s + 1) / 2,
                s => -((s + 1) / 2),
            };
            step += 1;
            let xi = x0 + off;
            let d = T::from_int(xi, &self.zero).sub(&c);
            let part = above.add(&self.red.bstar[l].mul(&d.mul(&d)));
            if part > self.radius {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.node_budget {
                return Err(Error::budget("lattice enumeration", self.nodes as f64, self.node_budget as f64));
            }
            self.x[l] = xi;
            if l == 0 {
                self.leaf(&part)?;
            } else {
                self.level(l - 1, part)?;
            }
        }
        self.x[l] = 0;
        Ok(())
    }

    fn leaf(&mut self, norm_sq: &T) -> Result<()> {
        if self.x.iter().all(|&v| v == 0) {
            return Ok(());
        }
        let coeffs = self.coeffs();
        if self.support.iter().any(|&i| coeffs[i].is_zero()) {
            return Ok(());
        }
        if let Some(r) = (self.visit)(&coeffs, norm_sq) {
            if r < self.radius {
                self.radius = r;
            }
        }
        Ok(())
    }
}
