//! Fixed-point screening of integer vectors.
//!
//! Each coordinate is held as a residue (`floor(frac(y) * 2^128)` or an exact
//! residue modulo a common denominator), so `<q, y>` modulo 1 is a handful of
//! wrapping additions per candidate. Only candidates that might beat the
//! current best of their height bin pay for a logarithm.

use rayon::prelude::*;

/// Arithmetic on residues modulo 1.
pub(crate) trait Ring: Copy + Send + Sync {
    fn add(self, a: u128, b: u128) -> u128;
    fn mul(self, a: u128, k: i64) -> u128;
    /// Distance to the nearest integer, in ring units.
    fn dist(self, s: u128) -> u128;
    fn err(self, d: u128) -> f64;
    /// Ring units covering an error of `e`, rounded up.
    fn units(self, e: f64) -> u128;
}

/// Residues `floor(frac * 2^128)`, wrapping arithmetic.
#[derive(Clone, Copy)]
pub(crate) struct Fixed;

/// Exact residues modulo `m < 2^63`.
#[derive(Clone, Copy)]
pub(crate) struct Modular(pub u128);

const TWO128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

impl Ring for Fixed {
    #[inline(always)]
    fn add(self, a: u128, b: u128) -> u128 {
        a.wrapping_add(b)
    }
    #[inline(always)]
    fn mul(self, a: u128, k: i64) -> u128 {
        a.wrapping_mul(k as i128 as u128)
    }
    #[inline(always)]
    fn dist(self, s: u128) -> u128 {
        s.min(s.wrapping_neg())
    }
    fn err(self, d: u128) -> f64 {
        d as f64 / TWO128
    }
    fn units(self, e: f64) -> u128 {
        let u = e * TWO128;
        if u >= TWO128 {
            u128::MAX
        } else {
            (u as u128).saturating_add(1)
        }
    }
}

impl Ring for Modular {
    #[inline(always)]
    fn add(self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    #[inline(always)]
    fn mul(self, a: u128, k: i64) -> u128 {
        let kk = (k as i128).rem_euclid(self.0 as i128) as u128;
        (a * kk) % self.0
    }
    #[inline(always)]
    fn dist(self, s: u128) -> u128 {
        s.min(self.0 - s)
    }
    fn err(self, d: u128) -> f64 {
        d as f64 / self.0 as f64
    }
    fn units(self, e: f64) -> u128 {
        let u = e * self.0 as f64;
        if u >= self.0 as f64 {
            self.0
        } else {
            (u as u128).saturating_add(1)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Cand {
    pub q: Vec<i64>,
    pub height: u64,
    pub quality: f64,
}

/// Strict total order: higher quality, then lower height, then smaller `q`.
pub(crate) fn better(a: &Cand, b: &Cand) -> bool {
    match a.quality.total_cmp(&b.quality) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (a.height, &a.q) < (b.height, &b.q),
    }
}

pub(crate) const MAX_SUSPECTS: usize = 32;
const BINS: usize = 64;

/// Running bests of one shard of the enumeration.
#[derive(Clone)]
pub(crate) struct Tracker<R: Ring> {
    ring: R,
    scale: f64,
    lo: u64,
    slack: u128,
    pub bins: Vec<Option<Cand>>,
    thr: Vec<u128>,
    pub win: Option<Cand>,
    thr_win: u128,
    /// Near-zero candidates `(height, q)` needing an exact check.
    pub suspects: Vec<(u64, Vec<i64>)>,
    pub count: u64,
}

impl<R: Ring> Tracker<R> {
    pub fn new(ring: R, scale: f64, lo: u64, slack: u128) -> Self {
        Tracker {
            ring,
            scale,
            lo,
            slack,
            bins: vec![None; BINS],
            thr: vec![u128::MAX; BINS],
            win: None,
            thr_win: u128::MAX,
            suspects: Vec::new(),
            count: 0,
        }
    }

    fn threshold(&self, quality: f64, hmin: u64) -> u128 {
        // quality > best forces err < hmin^(-best/scale); pad for rounding
        let e = (-(quality / self.scale) * (hmin as f64).ln()).exp() * (1.0 + 1e-9);
        self.ring.units(e)
    }

    #[inline(always)]
    pub fn visit(&mut self, q: &[i64], h: u64, d: u128) {
        self.count += 1;
        self.check(q, h, d);
    }

    /// Smallest distance that `check` ignores at every height of bin `b`
    /// on one side of the window edge.
    #[inline(always)]
    fn gate(&self, b: usize, in_win: bool) -> u128 {
        let t = match (b, in_win) {
            (0, _) => 0,
            (_, true) => self.thr[b].max(self.thr_win),
            (_, false) => self.thr[b],
        };
        t.max(self.slack + 1)
    }

    #[inline(always)]
    fn check(&mut self, q: &[i64], h: u64, d: u128) {
        if d <= self.slack {
            self.suspect(q, h);
            return;
        }
        if h < 2 {
            return;
        }
        let b = 63 - h.leading_zeros() as usize;
        let in_win = h >= self.lo;
        let t = if in_win { self.thr[b].max(self.thr_win) } else { self.thr[b] };
        if d < t {
            self.score(q, h, d, b, in_win);
        }
    }

    #[cold]
    fn suspect(&mut self, q: &[i64], h: u64) {
        let key = (h, q.to_vec());
        if self.suspects.len() >= MAX_SUSPECTS && key >= *self.suspects.last().expect("full") {
            return;
        }
        let pos = self.suspects.binary_search(&key).unwrap_or_else(|p| p);
        self.suspects.insert(pos, key);
        self.suspects.truncate(MAX_SUSPECTS);
    }

    #[cold]
    fn score(&mut self, q: &[i64], h: u64, d: u128, b: usize, in_win: bool) {
        let err = self.ring.err(d);
        let quality = self.scale * (-err.ln()) / (h as f64).ln();
        let cand = Cand { q: q.to_vec(), height: h, quality };
        if self.bins[b].as_ref().is_none_or(|c| better(&cand, c)) {
            self.thr[b] = self.threshold(quality, 1u64 << b);
            self.bins[b] = Some(cand.clone());
        }
        if in_win && self.win.as_ref().is_none_or(|c| better(&cand, c)) {
            self.thr_win = self.threshold(quality, self.lo);
            self.win = Some(cand);
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.bins.iter_mut().zip(other.bins) {
            if let Some(b) = b {
                if a.as_ref().is_none_or(|c| better(&b, c)) {
                    *a = Some(b);
                }
            }
        }
        if let Some(w) = other.win {
            if self.win.as_ref().is_none_or(|c| better(&w, c)) {
                self.win = Some(w);
            }
        }
        self.suspects.extend(other.suspects);
        self.suspects.sort();
        self.suspects.dedup();
        self.suspects.truncate(MAX_SUSPECTS);
        self.count += other.count;
        self
    }
}

/// Enumeration region for linear-form searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Region {
    /// `1 <= sup|q_i| <= q_max`, height is the sup norm.
    Box,
    /// `prod max(1,|q_i|) <= q_max`, height is that product.
    Hyperbolic,
}

/// Recursion state for one shard.
struct Walk<'a, R: Ring> {
    ring: R,
    ys: &'a [u128],
    q_max: i64,
    region: Region,
}

impl<R: Ring> Walk<'_, R> {
    /// Coordinates `idx..n` free; `acc` is the partial sum, `h` the partial
    /// height, `room` the remaining product budget for the hyperbolic region.
    fn rec(&self, q: &mut [i64], idx: usize, acc: u128, h: u64, room: i64, tr: &mut Tracker<R>) {
        let n = q.len();
        let m = match self.region {
            Region::Box => self.q_max,
            Region::Hyperbolic => room,
        };
        let y = self.ys[idx];
        if idx + 1 == n {
            self.last(q, acc, h, m, tr);
            return;
        }
        let mut s = self.ring.add(acc, self.ring.mul(y, -m));
        for v in -m..=m {
            q[idx] = v;
            let (hv, r) = match self.region {
                Region::Box => (h.max(v.unsigned_abs()), room),
                Region::Hyperbolic => (h * v.unsigned_abs().max(1), room / v.abs().max(1)),
            };
            self.rec(q, idx + 1, s, hv, r, tr);
            s = self.ring.add(s, y);
        }
    }
}

impl<R: Ring> Walk<'_, R> {
    /// Height with the last coordinate of absolute value `a`.
    #[inline(always)]
    fn height(&self, h: u64, a: u64) -> u64 {
        match self.region {
            Region::Box => h.max(a),
            Region::Hyperbolic => h * a.max(1),
        }
    }

    /// Smallest `a >= 1` whose height is at least `x`.
    fn abs_at_least(&self, h: u64, x: u64) -> u64 {
        match self.region {
            Region::Box => {
                if h >= x {
                    1
                } else {
                    x
                }
            }
            Region::Hyperbolic => x.div_ceil(h).max(1),
        }
    }

    /// Largest `a` whose height is at most `x`.
    fn abs_at_most(&self, h: u64, x: u64) -> u64 {
        match self.region {
            Region::Box => x,
            Region::Hyperbolic => x / h,
        }
    }

    /// Gate valid for every height in `hlo..=hhi`.
    fn span_gate(tr: &Tracker<R>, hlo: u64, hhi: u64) -> u128 {
        let w = hhi >= tr.lo;
        let bin = |h: u64| 63 - h.leading_zeros() as usize;
        (bin(hlo)..=bin(hhi)).map(|b| tr.gate(b, w)).max().expect("nonempty")
    }

    /// Visit `v = from..=to` (all of one sign) with residue `s` at `from`.
    #[inline(always)]
    fn scan(&self, q: &mut [i64], s: &mut u128, h: u64, from: i64, to: i64, span: (u64, u64), tr: &mut Tracker<R>) {
        let idx = q.len() - 1;
        let y = self.ys[idx];
        let mut g = Self::span_gate(tr, span.0, span.1);
        for v in from..=to {
            let d = self.ring.dist(*s);
            if d < g {
                q[idx] = v;
                tr.check(q, self.height(h, v.unsigned_abs()), d);
                g = Self::span_gate(tr, span.0, span.1);
            }
            *s = self.ring.add(*s, y);
        }
    }

    /// Innermost coordinate over `-m..=m`. Heights are monotone in `|v|`, so
    /// past a short core the bin and window side change only at a few points
    /// and one gate per stretch filters the residues.
    fn last(&self, q: &mut [i64], acc: u128, h: u64, m: i64, tr: &mut Tracker<R>) {
        const CORE: u64 = 32;
        let y = self.ys[q.len() - 1];
        let mu = m as u64;
        let core = mu.min(CORE);
        let lo = tr.lo;
        // last |v| from `a` upward with the same bin and window side
        let up = |a: u64| -> u64 {
            let hv = self.height(h, a);
            let b = 63 - hv.leading_zeros() as usize;
            let mut top = self.abs_at_most(h, (1u64 << b) - 1 + (1u64 << b));
            if hv < lo {
                top = top.min(self.abs_at_most(h, lo - 1));
            }
            top.clamp(a, mu)
        };
        // last |v| from `a` downward, not below `core + 1`
        let down = |a: u64| -> u64 {
            let hv = self.height(h, a);
            let b = 63 - hv.leading_zeros() as usize;
            let mut floor = self.abs_at_least(h, 1u64 << b);
            if hv >= lo {
                floor = floor.max(self.abs_at_least(h, lo));
            }
            floor.clamp(core + 1, a)
        };
        let mut s = self.ring.add(acc, self.ring.mul(y, -m));
        let mut a = mu;
        while a > core {
            let end = down(a);
            self.scan(q, &mut s, h, -(a as i64), -(end as i64), (self.height(h, end), self.height(h, a)), tr);
            a = end - 1;
        }
        let c = core as i64;
        self.scan(q, &mut s, h, -c, c, (self.height(h, 0), self.height(h, core)), tr);
        let mut a = core + 1;
        while a <= mu {
            let end = up(a);
            self.scan(q, &mut s, h, a as i64, end as i64, (self.height(h, a), self.height(h, end)), tr);
            a = end + 1;
        }
        tr.count += 2 * mu + 1;
    }
}

/// Run the linear-form search over all lexicographically positive `q`.
pub(crate) fn search_linear<R: Ring>(
    ring: R,
    ys: &[u128],
    q_max: u64,
    region: Region,
    scale: f64,
    lo: u64,
    slack: u128,
) -> Tracker<R> {
    let n = ys.len();
    let q_max = q_max as i64;
    let tasks: Vec<(usize, i64)> = (0..n).flat_map(|j| (1..=q_max).map(move |v| (j, v))).collect();
    let walk = Walk { ring, ys, q_max, region };
    tasks
        .par_iter()
        .fold(
            || Tracker::new(ring, scale, lo, slack),
            |mut tr, &(j, v)| {
                let mut q = vec![0i64; n];
                q[j] = v;
                let acc = ring.mul(ys[j], v);
                let h = v as u64;
                if j + 1 == n {
                    tr.visit(&q, h, ring.dist(acc));
                } else {
                    walk.rec(&mut q[..], j + 1, acc, h, q_max / v, &mut tr);
                }
                tr
            },
        )
        .reduce(|| Tracker::new(ring, scale, lo, slack), Tracker::merge)
}

/// Scalar search `q = 1..=q_max`, error is the largest coordinate distance.
pub(crate) fn search_scalar<R: Ring>(ring: R, ys: &[u128], q_max: u64, lo: u64, slack: u128) -> Tracker<R> {
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<u64> = (0..q_max.div_ceil(CHUNK)).collect();
    chunks
        .par_iter()
        .fold(
            || Tracker::new(ring, 1.0, lo, slack),
            |mut tr, &c| {
                let start = c * CHUNK + 1;
                let end = ((c + 1) * CHUNK).min(q_max);
                let mut s: Vec<u128> = ys.iter().map(|&y| ring.mul(y, start as i64)).collect();
                let mut qv = [0i64; 1];
                for q in start..=end {
                    let d = s.iter().map(|&x| ring.dist(x)).max().unwrap_or(0);
                    qv[0] = q as i64;
                    tr.visit(&qv, q, d);
                    for (x, &y) in s.iter_mut().zip(ys) {
                        *x = ring.add(*x, y);
                    }
                }
                tr
            },
        )
        .reduce(|| Tracker::new(ring, 1.0, lo, slack), Tracker::merge)
}

/// Number of lexicographically positive `q` with `prod max(1,|q_i|) <= q_max`.
pub(crate) fn hyperbolic_count(n: usize, q_max: u64) -> f64 {
    fn all(n: usize, r: u64, memo: &mut std::collections::HashMap<(usize, u64), f64>) -> f64 {
        // vectors in Z^n (zero included) with product bound r
        if n == 0 {
            return 1.0;
        }
        if let Some(&v) = memo.get(&(n, r)) {
            return v;
        }
        let mut total = 3.0 * all(n - 1, r, memo);
        let mut k = 2u64;
        while k <= r {
            let v = r / k;
            let k_hi = r / v;
            total += 2.0 * (k_hi - k + 1) as f64 * all(n - 1, v, memo);
            k = k_hi + 1;
        }
        memo.insert((n, r), total);
        total
    }
    let mut memo = std::collections::HashMap::new();
    (all(n, q_max, &mut memo) - 1.0) / 2.0
}

/// Number of lexicographically positive `q` with `sup|q_i| <= q_max`.
pub(crate) fn box_count(n: usize, q_max: u64) -> f64 {
    ((2.0 * q_max as f64 + 1.0).powi(n as i32) - 1.0) / 2.0
}
