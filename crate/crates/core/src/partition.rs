//! Sorted partitions, query batches, the right-padding transform and the
//! linear-scan reference answer.

use alloc::vec::Vec;

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aligned::AlignedBuf;
use crate::error::{Error, Result};
use crate::real::{floor_log2, Precision, Real};

/// A strictly increasing array `X_0 < X_1 < ... < X_N` of finite knots, `N ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedPartition<T: Real> {
    values: Vec<T>,
}

impl<T: Real> SortedPartition<T> {
    /// Checks the knots and wraps them unchanged.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotStrictlyIncreasing(i + 1));
        }
        Ok(SortedPartition { values })
    }

    #[inline(always)]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of intervals `N` (one less than the number of knots).
    #[inline(always)]
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    #[inline(always)]
    pub fn first(&self) -> T {
        self.values[0]
    }

    #[inline(always)]
    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    #[inline(always)]
    pub fn contains(&self, z: T) -> bool {
        self.first() <= z && z < self.last()
    }

    /// Smallest distance between knots `q` positions apart, `min_i (X_{i+q} - X_i)`,
    /// evaluated in the storage precision.
    pub fn min_gap(&self, q: usize) -> T {
        let v = &self.values;
        let mut best = v[v.len() - 1] - v[0];
        for i in 0..v.len().saturating_sub(q) {
            let g = v[i + q] - v[i];
            if g < best {
                best = g;
            }
        }
        best
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Validates a raw knot array.
pub fn validate_partition<T: Real>(raw: Vec<T>) -> Result<SortedPartition<T>> {
    SortedPartition::new(raw)
}

/// Queries for one partition, every value in `[X_0, X_N)`, stored 32-byte aligned.
#[derive(Clone, Debug)]
pub struct QueryBatch<T: Real> {
    values: AlignedBuf<T>,
    lo: T,
    hi: T,
}

impl<T: Real> QueryBatch<T> {
    /// Fails with `OutOfDomain(j)` for the first query outside `[X_0, X_N)`.
    pub fn new(p: &SortedPartition<T>, values: &[T]) -> Result<Self> {
        if let Some(j) = values.iter().position(|&z| !p.contains(z)) {
            return Err(Error::OutOfDomain(j));
        }
        Ok(QueryBatch { values: AlignedBuf::from_slice(values), lo: p.first(), hi: p.last() })
    }

    #[inline(always)]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when this batch was validated against a partition with the same endpoints.
    pub fn targets(&self, p: &SortedPartition<T>) -> bool {
        self.lo == p.first() && self.hi == p.last()
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random partition with `X_0 = 0` and gaps drawn uniformly from `[gap_lo, gap_hi]`.
///
/// Gaps are drawn and accumulated in double precision, then each knot is rounded to
/// `T`. The stream is ChaCha8 seeded through `seed_from_u64`, so a seed reproduces the
/// same knots on every platform.
pub fn gen_uniform_gap_partition<T: Real>(
    size: usize,
    gap_lo: f64,
    gap_hi: f64,
    seed: u64,
) -> Result<SortedPartition<T>> {
    if size < 2 {
        return Err(Error::InvalidArgument("partition size must be at least 2"));
    }
    if !(gap_lo > 0.0 && gap_lo <= gap_hi && gap_hi.is_finite()) {
        return Err(Error::InvalidArgument("gap bounds must satisfy 0 < lo <= hi"));
    }
    let gaps = Uniform::new_inclusive(gap_lo, gap_hi)
        .map_err(|_| Error::InvalidArgument("gap bounds must satisfy 0 < lo <= hi"))?;
    let mut rng = rng(seed);
    let mut acc = 0.0f64;
    let mut values = Vec::with_capacity(size);
    values.push(T::ZERO);
    for _ in 1..size {
        acc += gaps.sample(&mut rng);
        values.push(T::from_f64(acc));
    }
    SortedPartition::new(values)
}

/// `count` queries uniform over `[X_0, X_N)`.
pub fn gen_queries<T: Real>(p: &SortedPartition<T>, count: usize, seed: u64) -> Result<QueryBatch<T>> {
    if count == 0 {
        return Err(Error::InvalidArgument("query count must be at least 1"));
    }
    let lo = p.first().to_f64();
    let width = p.last().to_f64() - lo;
    let below_last = p.last().next_down();
    let mut rng = rng(seed);
    let values: Vec<T> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let z = T::from_f64(lo + u * width);
            // rounding to T can land on X_N or, for tiny widths, below X_0
            if z > below_last {
                below_last
            } else if z < p.first() {
                p.first()
            } else {
                z
            }
        })
        .collect();
    QueryBatch::new(p, &values)
}

/// A partition right-padded with `X_N` up to `2^p` slots, `p = 1 + ⌊log2 N⌋`.
#[derive(Clone, Debug)]
pub struct PaddedPartition<T: Real> {
    base: SortedPartition<T>,
    padded: Vec<T>,
    bits: u32,
    probe: usize,
}

impl<T: Real> PaddedPartition<T> {
    pub fn base(&self) -> &SortedPartition<T> {
        &self.base
    }

    #[inline(always)]
    pub fn padded(&self) -> &[T] {
        &self.padded
    }

    /// Bit count `p` of the largest interval index.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Leading probe `P = 2^⌊log2 N⌋`.
    #[inline(always)]
    pub fn probe(&self) -> usize {
        self.probe
    }

    /// Slots appended beyond the base array.
    pub fn extra_slots(&self) -> usize {
        self.padded.len() - self.base.values().len()
    }
}

/// Leading probe constant `2^⌊log2 N⌋` of the bit-set searches.
pub fn probe_constant(intervals: usize) -> usize {
    1usize << floor_log2(intervals)
}

pub fn pad_right_pow2<T: Real>(p: &SortedPartition<T>) -> PaddedPartition<T> {
    let n = p.intervals();
    let bits = 1 + floor_log2(n);
    let len = 1usize << bits;
    let mut padded = Vec::with_capacity(len);
    padded.extend_from_slice(p.values());
    padded.resize(len, p.last());
    PaddedPartition { base: p.clone(), padded, bits, probe: probe_constant(n) }
}

/// Reference answer: `max { i : X_i <= z }` by straight scan.
pub fn linear_scan_oracle<T: Real>(p: &SortedPartition<T>, z: T) -> Result<usize> {
    if !p.contains(z) {
        return Err(Error::OutOfDomain(0));
    }
    let v = p.values();
    let mut i = 0;
    while i + 1 < v.len() && v[i + 1] <= z {
        i += 1;
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn x0123() -> SortedPartition<f64> {
        SortedPartition::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(x0123().intervals(), 3);
        assert_eq!(validate_partition(vec![0.0, 1.0, 1.0, 3.0]), Err(Error::NotStrictlyIncreasing(2)));
        assert_eq!(validate_partition(vec![0.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert_eq!(validate_partition(vec![0.0, f64::INFINITY]), Err(Error::NonFinite(1)));
        assert_eq!(validate_partition(vec![1.0f32]), Err(Error::TooShort));
        assert_eq!(validate_partition(Vec::<f32>::new()), Err(Error::TooShort));
        assert_eq!(validate_partition(vec![2.0, 1.0]), Err(Error::NotStrictlyIncreasing(1)));
    }

    #[test]
    fn oracle_examples() {
        let p = x0123();
        assert_eq!(linear_scan_oracle(&p, 1.5), Ok(1));
        assert_eq!(linear_scan_oracle(&p, 1.0), Ok(1));
        assert_eq!(linear_scan_oracle(&p, 0.0), Ok(0));
        assert_eq!(linear_scan_oracle(&p, 3.0f64.next_down()), Ok(2));
        assert_eq!(linear_scan_oracle(&p, 3.0), Err(Error::OutOfDomain(0)));
        assert_eq!(linear_scan_oracle(&p, -0.5), Err(Error::OutOfDomain(0)));
    }

    #[test]
    fn padding_examples() {
        let p15 = gen_uniform_gap_partition::<f32>(15, 1.0, 5.0, 1).unwrap();
        let pp = pad_right_pow2(&p15);
        assert_eq!(pp.padded().len(), 16);
        assert_eq!(pp.padded()[15], p15.values()[14]);
        assert_eq!(pp.bits(), 4);
        assert_eq!(pp.probe(), 8);

        let p4 = x0123();
        let pp = pad_right_pow2(&p4);
        assert_eq!(pp.padded(), p4.values());
        assert_eq!(pp.extra_slots(), 0);

        let p9 = gen_uniform_gap_partition::<f64>(9, 1.0, 5.0, 2).unwrap();
        let pp = pad_right_pow2(&p9);
        assert_eq!(pp.padded().len(), 16);
        assert!(pp.padded()[9..].iter().all(|&v| v == p9.values()[8]));
        assert_eq!(pp.extra_slots(), 16 - 9);
    }

    #[test]
    fn generator_examples() {
        let p = gen_uniform_gap_partition::<f64>(16, 1.0, 5.0, 42).unwrap();
        assert_eq!(p.first(), 0.0);
        assert!(p.values().windows(2).all(|w| (1.0..=5.0).contains(&(w[1] - w[0]))));

        let p = gen_uniform_gap_partition::<f32>(2, 1.0, 1.0, 99).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0]);

        let p = gen_uniform_gap_partition::<f64>(4096, 1.0, 5.0, 7).unwrap();
        let mean = p.last() / 4095.0;
        assert!((mean - 3.0).abs() < 0.15, "mean gap {mean}");

        assert!(gen_uniform_gap_partition::<f64>(1, 1.0, 5.0, 0).is_err());
        assert!(gen_uniform_gap_partition::<f64>(8, 0.0, 5.0, 0).is_err());
        assert!(gen_uniform_gap_partition::<f64>(8, 3.0, 2.0, 0).is_err());
    }

    #[test]
    fn generators_reproducible() {
        let a = gen_uniform_gap_partition::<f32>(1000, 1.0, 5.0, 5).unwrap();
        let b = gen_uniform_gap_partition::<f32>(1000, 1.0, 5.0, 5).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let qa = gen_queries(&a, 100, 3).unwrap();
        let qb = gen_queries(&a, 100, 3).unwrap();
        assert!(qa.values().iter().zip(qb.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn queries_in_domain() {
        let p = SortedPartition::new(vec![0.0f32, 1.0]).unwrap();
        let q = gen_queries(&p, 1000, 11).unwrap();
        assert!(q.values().iter().all(|&z| (0.0..1.0).contains(&z)));
        assert!(q.targets(&p));
        assert_eq!(gen_queries(&p, 0, 11).unwrap_err(), Error::InvalidArgument("query count must be at least 1"));
        assert_eq!(QueryBatch::new(&p, &[0.5, 1.0]).unwrap_err(), Error::OutOfDomain(1));
    }

    #[test]
    fn min_gap_by_offset() {
        let p = SortedPartition::new(vec![0.0, 0.5, 0.7, 1.1]).unwrap();
        assert_eq!(p.min_gap(1), 0.7 - 0.5);
        assert_eq!(p.min_gap(2), 1.1 - 0.5);
        assert_eq!(p.min_gap(3), 1.1);
    }
}
