//! Comparison-based lower-bound searches.
//!
//! | kernel | loop | extra memory |
//! |---|---|---|
//! | [`classic_search`] | data-dependent exit, branch | none |
//! | [`bitset_search_v1`] | `⌊log2 N⌋ + 1` iterations, guarded probe | none |
//! | [`bitset_search_v2`] | same count, unguarded probe | right padding to `2^p` |
//! | [`bitset_search_v3`] | same count, probe clamped to `N` | none |
//! | [`offset_search`] | `J + 1` probes, start index + range size | none |
//!
//! Every kernel assumes `X_0 <= z < X_N`; callers check the domain once per batch.
//! The `*_in` variants take any [`Keys`] so tests can observe the probes.

use core::hint::select_unpredictable;

use crate::keys::Keys;
use crate::partition::{PaddedPartition, SortedPartition};
use crate::real::{floor_log2, Real};

/// `i + step` if `c`, else `i`, as a conditional move rather than a branch.
#[inline(always)]
pub(crate) fn advance(i: usize, step: usize, c: bool) -> usize {
    select_unpredictable(c, i + step, i)
}

/// Bottenbruch-style bisection of `[low, high]` until the bracket is one interval wide.
#[inline]
pub fn classic_search<T: Real>(p: &SortedPartition<T>, z: T) -> usize {
    classic_search_in(p.values(), z)
}

#[inline]
pub fn classic_search_in<T: Real, K: Keys<T> + ?Sized>(x: &K, z: T) -> usize {
    let mut low = 0usize;
    let mut high = x.len() - 1;
    while high - low > 1 {
        let mid = (low + high) >> 1;
        if z < x.get(mid) {
            high = mid;
        } else {
            low = mid;
        }
    }
    low
}

/// Resolves the bits of the answer from the top down; `probe` is `2^⌊log2 N⌋`.
#[inline]
pub fn bitset_search_v1<T: Real>(p: &SortedPartition<T>, probe: usize, z: T) -> usize {
    bitset_search_v1_in(p.values(), probe, z)
}

#[inline]
pub fn bitset_search_v1_in<T: Real, K: Keys<T> + ?Sized>(x: &K, probe: usize, z: T) -> usize {
    let n = x.len() - 1;
    let mut i = 0usize;
    let mut k = probe;
    loop {
        x.step();
        let r = i | k;
        if r < n {
            i = advance(i, k, z >= x.get(r));
        }
        k >>= 1;
        if k == 0 {
            return i;
        }
    }
}

/// Bit-set search on the right-padded array: no range guard, one select per step.
#[inline]
pub fn bitset_search_v2<T: Real>(pp: &PaddedPartition<T>, z: T) -> usize {
    bitset_search_v2_in(pp.padded(), pp.probe(), z)
}

#[inline]
pub fn bitset_search_v2_in<T: Real, K: Keys<T> + ?Sized>(padded: &K, probe: usize, z: T) -> usize {
    let mut i = 0usize;
    let mut k = probe;
    loop {
        padded.step();
        i = advance(i, k, z >= padded.get(i | k));
        k >>= 1;
        if k == 0 {
            return i;
        }
    }
}

/// Bit-set search without padding: the load index is clamped to `N`.
#[inline]
pub fn bitset_search_v3<T: Real>(p: &SortedPartition<T>, probe: usize, z: T) -> usize {
    bitset_search_v3_in(p.values(), probe, z)
}

#[inline]
pub fn bitset_search_v3_in<T: Real, K: Keys<T> + ?Sized>(x: &K, probe: usize, z: T) -> usize {
    let n = x.len() - 1;
    let mut i = 0usize;
    let mut k = probe;
    loop {
        x.step();
        i = advance(i, k, z >= x.get((i | k).min(n)));
        k >>= 1;
        if k == 0 {
            return i;
        }
    }
}

/// Loop count of the bit-set kernels for `N` intervals.
pub const fn bitset_iterations(intervals: usize) -> usize {
    floor_log2(intervals) as usize + 1
}

/// Precomputed constants of [`offset_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OffsetConstants {
    /// First probe position, `(N + 1) / 2`.
    pub first: usize,
    /// Range size left after the first probe, `N + 1 - first`.
    pub size: usize,
    /// Remaining iterations, `⌊log2 (N + 1)⌋`.
    pub iterations: u32,
}

pub fn offset_constants(intervals: usize) -> OffsetConstants {
    let len = intervals + 1;
    let first = len / 2;
    OffsetConstants { first, size: len - first, iterations: floor_log2(len) }
}

/// Start index plus range size; the size halves deterministically so only the start
/// index is conditionally updated.
#[inline]
pub fn offset_search<T: Real>(p: &SortedPartition<T>, c: OffsetConstants, z: T) -> usize {
    offset_search_in(p.values(), c, z)
}

#[inline]
pub fn offset_search_in<T: Real, K: Keys<T> + ?Sized>(x: &K, c: OffsetConstants, z: T) -> usize {
    let mut i = advance(0, c.first, z >= x.get(c.first));
    let mut size = c.size;
    for _ in 0..c.iterations {
        x.step();
        let half = size >> 1;
        i = advance(i, half, z >= x.get(i + half));
        size -= half;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{gen_uniform_gap_partition, linear_scan_oracle, pad_right_pow2, probe_constant};
    use alloc::vec;

    fn x0123() -> SortedPartition<f64> {
        SortedPartition::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn classic_examples() {
        let p = x0123();
        assert_eq!(classic_search(&p, 2.9), 2);
        assert_eq!(classic_search(&p, 0.0), 0);
    }

    #[test]
    fn bitset_examples() {
        let p = x0123();
        let probe = probe_constant(p.intervals());
        assert_eq!(bitset_search_v1(&p, probe, 1.5), 1);
        assert_eq!(bitset_search_v3(&p, probe, 1.0), 1);
        let pp = pad_right_pow2(&p);
        assert_eq!(bitset_search_v2(&pp, 2.5), 2);

        let p9 = gen_uniform_gap_partition::<f64>(9, 1.0, 5.0, 3).unwrap();
        let probe = probe_constant(8);
        let z = p9.last().next_down();
        assert_eq!(bitset_search_v1(&p9, probe, z), 7);
        assert_eq!(bitset_search_v2(&pad_right_pow2(&p9), z), 7);
        assert_eq!(bitset_search_v3(&p9, probe, p9.first()), 0);
    }

    #[test]
    fn offset_constant_examples() {
        assert_eq!(offset_constants(7), OffsetConstants { first: 4, size: 4, iterations: 3 });
        assert_eq!(offset_constants(1), OffsetConstants { first: 1, size: 1, iterations: 1 });
        assert_eq!(offset_constants(14), OffsetConstants { first: 7, size: 8, iterations: 3 });
    }

    #[test]
    fn offset_examples() {
        let p = x0123();
        assert_eq!(offset_search(&p, offset_constants(3), 2.2), 2);
        let p = SortedPartition::new(vec![0.0f32, 1.0]).unwrap();
        assert_eq!(offset_search(&p, offset_constants(1), 0.5), 0);
    }

    #[test]
    fn offset_sweep_small_sizes() {
        for size in 2..=64usize {
            let p = gen_uniform_gap_partition::<f64>(size, 1.0, 5.0, size as u64).unwrap();
            let c = offset_constants(p.intervals());
            let v = p.values();
            for i in 0..p.intervals() {
                let mid = 0.5 * (v[i] + v[i + 1]);
                for z in [v[i], mid, v[i + 1].next_down()] {
                    assert_eq!(offset_search(&p, c, z), linear_scan_oracle(&p, z).unwrap(), "size {size} z {z}");
                }
            }
        }
    }
}
