//! O(1) direct search through a bucket index.
//!
//! The bucket function is `f(z) = ⌊H·(z - X_0)⌋`. With `H` chosen so that knots
//! `q` positions apart always land in different buckets, the table `K` maps each
//! bucket to a knot index within `q` of the answer, and at most `q` comparisons
//! finish the search.
//!
//! All bucket arithmetic runs in the partition's own precision. Feasibility is
//! certified on the rounded offsets `D_i = m(X_i - X_0)` exactly as the kernels
//! evaluate them, so a built index never relies on exact real arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::partition::SortedPartition;
use crate::real::{pow2, Real};

/// Default bucket index width for either precision.
pub const DEFAULT_QBITS: u8 = 32;

/// Outcome of the approximate applicability test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// `min_i (X_{i+q} - X_i) / (X_N - X_0)`.
    pub ratio: f64,
    /// `max { 2^-Q, 2ε }`.
    pub threshold: f64,
    /// `ratio / threshold`; above 1 when feasible.
    pub margin: f64,
}

/// `max { 2^-Q, 2ε }` for the precision `T`.
pub fn feasibility_threshold<T: Real>(qbits: u8) -> f64 {
    let spacing = pow2::<f64>(-(qbits as i32));
    let round = 2.0 * T::ROUND_OFF.to_f64();
    if spacing > round {
        spacing
    } else {
        round
    }
}

/// Cheap advisory check of whether a direct index is likely buildable. The exact
/// checks happen in [`compute_h_r`].
pub fn feasibility_estimate<T: Real>(p: &SortedPartition<T>, qbits: u8, q: u8) -> Feasibility {
    let v = p.values();
    let q = (q.max(1) as usize).min(p.intervals());
    let width = p.last().to_f64() - p.first().to_f64();
    let mut min_gap = width;
    for i in 0..v.len() - q {
        let g = v[i + q].to_f64() - v[i].to_f64();
        if g < min_gap {
            min_gap = g;
        }
    }
    let ratio = min_gap / width;
    let threshold = feasibility_threshold::<T>(qbits);
    Feasibility { feasible: ratio > threshold, ratio, threshold, margin: ratio / threshold }
}

/// How often the trial-and-error loop had to enlarge `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HGrowthStats<T: Real> {
    pub increments: u32,
    pub initial_h: T,
    pub final_h: T,
}

impl<T: Real> HGrowthStats<T> {
    pub fn growth_total(&self) -> T {
        self.final_h - self.initial_h
    }
}

/// A certified scale factor and the resulting bucket count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HrSolution<T: Real> {
    pub h: T,
    /// Largest bucket index `R = ⌊H·D_N⌋`.
    pub r: u64,
    /// Numeric lower bound `m(1 / min_i m(D_{i+q} - D_i))`.
    pub lower_bound: T,
    pub qbits: u8,
    pub gap: u8,
    pub stats: HGrowthStats<T>,
}

#[inline(always)]
fn offsets<T: Real>(v: &[T]) -> impl Iterator<Item = T> + '_ {
    let x0 = v[0];
    v.iter().map(move |&x| x - x0)
}

fn check_params(intervals: usize, qbits: u8, q: u8) -> Result<()> {
    if qbits != 32 && qbits != 64 {
        return Err(Error::UnsupportedBits(qbits));
    }
    if q == 0 || q as usize > intervals {
        return Err(Error::UnsupportedGap(q));
    }
    if intervals as u64 > u32::MAX as u64 {
        return Err(Error::TooLarge);
    }
    Ok(())
}

/// Finds a scale factor `H` for which `⌊m(H·D_{i+q})⌋ > ⌊m(H·D_i)⌋` for every `i`,
/// starting just above the numeric lower bound and enlarging it by a growth term that
/// starts at one ulp and doubles on every failed check.
pub fn compute_h_r<T: Real>(p: &SortedPartition<T>, qbits: u8, q: u8) -> Result<HrSolution<T>> {
    let n = p.intervals();
    check_params(n, qbits, q)?;
    let gap = q as usize;
    let d: Vec<T> = offsets(p.values()).collect();

    // m(X_{i+q} - X_0) > m(X_i - X_0) is necessary for any H
    if let Some(i) = (0..=n - gap).find(|&i| d[i + gap] <= d[i]) {
        return Err(Error::NotDistinguishable(i + gap));
    }

    let mut min_diff = d[gap] - d[0];
    for i in 1..=n - gap {
        let diff = d[i + gap] - d[i];
        if diff < min_diff {
            min_diff = diff;
        }
    }
    let lower_bound = min_diff.recip();
    let initial_h = lower_bound.next_up();

    let limit = pow2::<T>(qbits as i32);
    let d_n = d[n];
    let fits = |h: T| h * d_n < limit;

    let mut h = initial_h;
    if !fits(h) {
        return Err(Error::Overflow);
    }
    let mut step = h.next_up() - h;
    let mut increments = 0u32;
    let separated = |h: T, i: usize| (h * d[i + gap]).trunc_u64() > (h * d[i]).trunc_u64();

    // a larger H can in principle re-merge an earlier pair, so repeat until a full pass
    // certifies every pair with the final H
    loop {
        let mut grew = false;
        for i in 0..=n - gap {
            while !separated(h, i) {
                h = h + step;
                increments += 1;
                grew = true;
                if !fits(h) {
                    return Err(Error::Overflow);
                }
                step = step + step;
            }
        }
        if !grew {
            break;
        }
    }

    let r = (h * d_n).trunc_u64();
    if r >= usize::MAX as u64 {
        return Err(Error::Overflow);
    }
    Ok(HrSolution { h, r, lower_bound, qbits, gap: q, stats: HGrowthStats { increments, initial_h, final_h: h } })
}

/// Closed-form estimate `R = 1 + ⌈(X_N - X_0) / min gap⌉`, `H = R / (X_N - X_0)`,
/// in double precision. Not robust under rounding; kept for comparison with
/// [`compute_h_r`].
pub fn closed_form_h_r<T: Real>(p: &SortedPartition<T>) -> (f64, u64) {
    let width = p.last().to_f64() - p.first().to_f64();
    let v = p.values();
    let min_gap = v.windows(2).map(|w| w[1].to_f64() - w[0].to_f64()).fold(f64::INFINITY, f64::min);
    let r = 1 + ceil_u64(width / min_gap);
    (r as f64 / width, r)
}

fn ceil_u64(x: f64) -> u64 {
    let t = x as u64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

/// Bytes per table entry needed to store knot indices up to `N`:
/// `min { b ∈ {1,2,4,8} : 2^(8b) >= N }`.
pub fn minimal_entry_bytes(intervals: usize) -> u8 {
    let n = intervals as u128;
    [1u8, 2, 4, 8].into_iter().find(|&b| (1u128 << (8 * b as u32)) >= n).unwrap_or(8)
}

/// `⌈(X_N - X_0) / min gap⌉ · B` bytes.
pub fn memory_cost_estimate<T: Real>(p: &SortedPartition<T>, entry_bytes: u8) -> u64 {
    let width = p.last().to_f64() - p.first().to_f64();
    let v = p.values();
    let min_gap = v.windows(2).map(|w| w[1].to_f64() - w[0].to_f64()).fold(f64::INFINITY, f64::min);
    ceil_u64(width / min_gap) * entry_bytes as u64
}

/// A table entry carrying the knot index together with the knot value, so the final
/// comparison reads from the same cache line as the index.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FusedPair<T: Real> {
    pub index: u32,
    pad: T::Pad,
    pub value: T,
}

impl<T: Real> FusedPair<T> {
    pub fn new(index: u32, value: T) -> Self {
        FusedPair { index, pad: T::Pad::default(), value }
    }
}

/// Bucket table for one partition; immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectIndex<T: Real> {
    x0: T,
    h: T,
    r: u64,
    gap: u8,
    qbits: u8,
    intervals: usize,
    k: Vec<u32>,
    fused: Option<Vec<FusedPair<T>>>,
}

impl<T: Real> DirectIndex<T> {
    /// Computes `H` and builds the table in one go.
    pub fn new(p: &SortedPartition<T>, qbits: u8, q: u8) -> Result<Self> {
        let sol = compute_h_r(p, qbits, q)?;
        Ok(build_index(p, &sol))
    }

    /// Reassembles an index from stored parts, checking the structural invariants.
    pub fn from_parts(x0: T, h: T, gap: u8, qbits: u8, intervals: usize, k: Vec<u32>) -> Result<Self> {
        check_params(intervals, qbits, gap)?;
        if !(x0.is_finite() && h.is_finite() && h > T::ZERO) {
            return Err(Error::MalformedIndex("non-finite or non-positive scale"));
        }
        let Some(&last) = k.last() else { return Err(Error::MalformedIndex("empty table")) };
        let r = (k.len() - 1) as u64;
        if qbits < 64 && r >> qbits != 0 {
            return Err(Error::MalformedIndex("bucket count exceeds index width"));
        }
        if last as usize != intervals {
            return Err(Error::MalformedIndex("last bucket must map to N"));
        }
        if gap == 1 && k[0] != 0 {
            return Err(Error::MalformedIndex("first bucket must map to 0"));
        }
        if k.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedIndex("table must be non-decreasing"));
        }
        Ok(DirectIndex { x0, h, r, gap, qbits, intervals, k, fused: None })
    }

    #[inline(always)]
    pub fn x0(&self) -> T {
        self.x0
    }

    #[inline(always)]
    pub fn h(&self) -> T {
        self.h
    }

    /// Largest bucket index `R`; the table holds `R + 1` entries.
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn gap(&self) -> u8 {
        self.gap
    }

    pub fn qbits(&self) -> u8 {
        self.qbits
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of sentinel copies of `X_0` the gap-`q` kernel logically reads left of `X_0`.
    pub fn left_pad(&self) -> usize {
        self.gap as usize - 1
    }

    #[inline(always)]
    pub fn table(&self) -> &[u32] {
        &self.k
    }

    pub fn fused(&self) -> Option<&[FusedPair<T>]> {
        self.fused.as_deref()
    }

    pub fn table_bytes(&self) -> usize {
        self.k.len() * core::mem::size_of::<u32>()
    }

    /// Adds the `(K_j, X_{K_j})` pairs used by [`direct_search_cache`]. Only meaningful
    /// for `q = 1`.
    pub fn with_fused(mut self, p: &SortedPartition<T>) -> Result<Self> {
        if self.gap != 1 {
            return Err(Error::UnsupportedGap(self.gap));
        }
        if p.intervals() != self.intervals || p.first() != self.x0 {
            return Err(Error::InvalidArgument("index was built for a different partition"));
        }
        let v = p.values();
        self.fused = Some(self.k.iter().map(|&t| FusedPair::new(t, v[t as usize])).collect());
        Ok(self)
    }

    /// Whether this index can serve `p`: same `N` and `X_0`, and `X_N` lands in bucket `R`,
    /// so every query in `[X_0, X_N)` maps inside the table.
    pub fn fits(&self, p: &SortedPartition<T>) -> bool {
        self.intervals == p.intervals() && self.x0 == p.first() && self.bucket(p.last()) as u64 == self.r
    }

    /// Bucket of `z`: `⌊H·(z - X_0)⌋`.
    #[inline(always)]
    pub fn bucket(&self, z: T) -> usize {
        (self.h * (z - self.x0)).trunc_u64() as usize
    }
}

/// Fills the bucket table for a solution produced by [`compute_h_r`] on the same partition.
///
/// For `q = 1`, `K_0 = 0` and `K_j = i` for `f(X_{i-1}) < j <= f(X_i)`, filled from the
/// right. For `q >= 2`, `K_j = max { i : f(X_i) <= j }`.
pub fn build_index<T: Real>(p: &SortedPartition<T>, sol: &HrSolution<T>) -> DirectIndex<T> {
    let v = p.values();
    let n = p.intervals();
    let x0 = p.first();
    let h = sol.h;
    let f = |x: T| (h * (x - x0)).trunc_u64() as usize;
    let r = sol.r as usize;
    let mut k = vec![0u32; r + 1];

    if sol.gap == 1 {
        let mut b = r as isize;
        let mut i = n;
        let mut knot = n as u32;
        while b >= 0 {
            let t = f(v[i]) as isize;
            while b > t {
                k[b as usize] = knot;
                b -= 1;
            }
            if b == t {
                knot = i as u32;
                k[b as usize] = knot;
                b -= 1;
            }
            if i == 0 {
                break;
            }
            i -= 1;
        }
    } else {
        let mut i = 0usize;
        let mut next = if n > 0 { f(v[1]) } else { usize::MAX };
        for (j, slot) in k.iter_mut().enumerate() {
            while i < n && next <= j {
                i += 1;
                next = if i < n { f(v[i + 1]) } else { usize::MAX };
            }
            *slot = i as u32;
        }
    }

    DirectIndex { x0, h, r: sol.r, gap: sol.gap, qbits: sol.qbits, intervals: n, k, fused: None }
}

/// One table lookup and one comparison; the index must have `q = 1`.
#[inline]
pub fn direct_search<T: Real>(idx: &DirectIndex<T>, p: &SortedPartition<T>, z: T) -> usize {
    debug_assert_eq!(idx.gap, 1);
    let t = idx.k[idx.bucket(z)] as usize;
    t - (z < p.values()[t]) as usize
}

/// `K_j - I(z < X_t) - I(z < X_{t-1})`, both indicators evaluated unconditionally.
/// `X_{-1}` reads as `X_0`; the index must have `q = 2`.
#[inline]
pub fn direct_search_gap2<T: Real>(idx: &DirectIndex<T>, p: &SortedPartition<T>, z: T) -> usize {
    debug_assert_eq!(idx.gap, 2);
    let x = p.values();
    let t = idx.k[idx.bucket(z)] as usize;
    t - (z < x[t]) as usize - (z < x[t.saturating_sub(1)]) as usize
}

/// Gap-`q` kernel: `K_j - Σ_{s<q} I(z < X_{t-s})`. Works for any `q`; slower than the
/// dedicated kernels.
#[inline]
pub fn direct_search_gap_q<T: Real>(idx: &DirectIndex<T>, p: &SortedPartition<T>, z: T) -> usize {
    let x = p.values();
    let t = idx.k[idx.bucket(z)] as usize;
    let mut below = 0usize;
    for s in 0..idx.gap as usize {
        below += (z < x[t.saturating_sub(s)]) as usize;
    }
    t - below
}

/// Like [`direct_search`] but the compared knot comes from the fused pair.
///
/// # Panics
///
/// If the index was built without fused pairs.
#[inline]
pub fn direct_search_cache<T: Real>(idx: &DirectIndex<T>, z: T) -> usize {
    let fused = idx.fused.as_deref().expect("index has no fused pairs");
    let pair = fused[idx.bucket(z)];
    pair.index as usize - (z < pair.value) as usize
}
