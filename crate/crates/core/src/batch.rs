//! Batch execution of any kernel over many queries, `d` queries per lock-step group.
//!
//! Each fixed-iteration kernel has a lane form that advances `d` independent searches
//! through the same loop trip together, so there is no per-lane early exit and the
//! inner loop over lanes is straight-line code the compiler can vectorize. Table
//! loads stay per lane (gathers). The classic search has a data-dependent loop exit
//! and is simply run once per query. The trailing `M mod d` queries go through the
//! scalar kernel. Results never depend on `d`.

use core::fmt;
use core::ops::Range;

use crate::binsearch::{
    advance, bitset_search_v1, bitset_search_v2, bitset_search_v3, classic_search, offset_constants, offset_search,
    OffsetConstants,
};
use crate::direct::{direct_search, direct_search_cache, direct_search_gap2, DirectIndex, DEFAULT_QBITS};
use crate::error::{Error, Result};
use crate::eytzinger::{build_layout, eytzinger_search, EytzingerLayout};
use crate::partition::{pad_right_pow2, probe_constant, PaddedPartition, QueryBatch, SortedPartition};
use crate::real::Real;

/// The nine search kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Classic,
    Bitset1,
    Bitset2,
    Bitset3,
    Offset,
    Eytzinger,
    Direct,
    DirectGap2,
    DirectCache,
}

impl Kernel {
    pub const ALL: [Kernel; 9] = [
        Kernel::Classic,
        Kernel::Bitset1,
        Kernel::Bitset2,
        Kernel::Bitset3,
        Kernel::Offset,
        Kernel::Eytzinger,
        Kernel::Direct,
        Kernel::DirectGap2,
        Kernel::DirectCache,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Kernel::Classic => "classic",
            Kernel::Bitset1 => "bitset1",
            Kernel::Bitset2 => "bitset2",
            Kernel::Bitset3 => "bitset3",
            Kernel::Offset => "offset",
            Kernel::Eytzinger => "eytzinger",
            Kernel::Direct => "direct",
            Kernel::DirectGap2 => "direct-gap2",
            Kernel::DirectCache => "direct-cache",
        }
    }

    pub fn from_name(name: &str) -> Option<Kernel> {
        Kernel::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Kernels backed by a bucket index (and therefore subject to feasibility).
    pub const fn is_direct(self) -> bool {
        matches!(self, Kernel::Direct | Kernel::DirectGap2 | Kernel::DirectCache)
    }

    /// Kernels whose loop trip count depends only on `N`.
    pub const fn is_fixed_iteration(self) -> bool {
        !matches!(self, Kernel::Classic)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
enum Prepared<T: Real> {
    Classic,
    Bitset1(usize),
    Bitset2(PaddedPartition<T>),
    Bitset3(usize),
    Offset(OffsetConstants),
    Eytzinger(EytzingerLayout<T>),
    Direct(DirectIndex<T>),
    DirectGap2(DirectIndex<T>),
    DirectCache(DirectIndex<T>),
}

/// A kernel together with whatever auxiliary structure it needs for one partition.
#[derive(Clone, Debug)]
pub struct Searcher<'a, T: Real> {
    partition: &'a SortedPartition<T>,
    prepared: Prepared<T>,
}

impl<'a, T: Real> Searcher<'a, T> {
    pub fn new(kernel: Kernel, p: &'a SortedPartition<T>) -> Result<Self> {
        Self::with_qbits(kernel, p, DEFAULT_QBITS)
    }

    /// `qbits` only matters for the direct kernels.
    pub fn with_qbits(kernel: Kernel, p: &'a SortedPartition<T>, qbits: u8) -> Result<Self> {
        let n = p.intervals();
        let prepared = match kernel {
            Kernel::Classic => Prepared::Classic,
            Kernel::Bitset1 => Prepared::Bitset1(probe_constant(n)),
            Kernel::Bitset2 => Prepared::Bitset2(pad_right_pow2(p)),
            Kernel::Bitset3 => Prepared::Bitset3(probe_constant(n)),
            Kernel::Offset => Prepared::Offset(offset_constants(n)),
            Kernel::Eytzinger => Prepared::Eytzinger(build_layout(p)),
            Kernel::Direct => Prepared::Direct(DirectIndex::new(p, qbits, 1)?),
            Kernel::DirectGap2 => Prepared::DirectGap2(DirectIndex::new(p, qbits, 2)?),
            Kernel::DirectCache => Prepared::DirectCache(DirectIndex::new(p, qbits, 1)?.with_fused(p)?),
        };
        Ok(Searcher { partition: p, prepared })
    }

    /// Wraps an existing direct index (for example one loaded from disk).
    pub fn from_index(kernel: Kernel, p: &'a SortedPartition<T>, idx: DirectIndex<T>) -> Result<Self> {
        if !idx.fits(p) {
            return Err(Error::InvalidArgument("index was built for a different partition"));
        }
        let prepared = match (kernel, idx.gap()) {
            (Kernel::Direct, 1) => Prepared::Direct(idx),
            (Kernel::DirectGap2, 2) => Prepared::DirectGap2(idx),
            (Kernel::DirectCache, 1) => {
                let idx = if idx.fused().is_some() { idx } else { idx.with_fused(p)? };
                Prepared::DirectCache(idx)
            }
            (k, g) if k.is_direct() => return Err(Error::UnsupportedGap(g)),
            _ => return Err(Error::InvalidArgument("kernel does not use a direct index")),
        };
        Ok(Searcher { partition: p, prepared })
    }

    pub fn kernel(&self) -> Kernel {
        match self.prepared {
            Prepared::Classic => Kernel::Classic,
            Prepared::Bitset1(_) => Kernel::Bitset1,
            Prepared::Bitset2(_) => Kernel::Bitset2,
            Prepared::Bitset3(_) => Kernel::Bitset3,
            Prepared::Offset(_) => Kernel::Offset,
            Prepared::Eytzinger(_) => Kernel::Eytzinger,
            Prepared::Direct(_) => Kernel::Direct,
            Prepared::DirectGap2(_) => Kernel::DirectGap2,
            Prepared::DirectCache(_) => Kernel::DirectCache,
        }
    }

    pub fn partition(&self) -> &'a SortedPartition<T> {
        self.partition
    }

    pub fn direct_index(&self) -> Option<&DirectIndex<T>> {
        match &self.prepared {
            Prepared::Direct(i) | Prepared::DirectGap2(i) | Prepared::DirectCache(i) => Some(i),
            _ => None,
        }
    }

    /// Domain-checked single search.
    pub fn search(&self, z: T) -> Result<usize> {
        if !self.partition.contains(z) {
            return Err(Error::OutOfDomain(0));
        }
        Ok(self.resolve(z))
    }

    /// Single search assuming `X_0 <= z < X_N`.
    #[inline]
    pub fn resolve(&self, z: T) -> usize {
        let p = self.partition;
        match &self.prepared {
            Prepared::Classic => classic_search(p, z),
            Prepared::Bitset1(probe) => bitset_search_v1(p, *probe, z),
            Prepared::Bitset2(pp) => bitset_search_v2(pp, z),
            Prepared::Bitset3(probe) => bitset_search_v3(p, *probe, z),
            Prepared::Offset(c) => offset_search(p, *c, z),
            Prepared::Eytzinger(lay) => eytzinger_search(lay, z),
            Prepared::Direct(idx) => direct_search(idx, p, z),
            Prepared::DirectGap2(idx) => direct_search_gap2(idx, p, z),
            Prepared::DirectCache(idx) => direct_search_cache(idx, z),
        }
    }

    fn run<const D: usize>(&self, zs: &[T], out: &mut [usize]) {
        let x = self.partition.values();
        match &self.prepared {
            Prepared::Classic => {
                for (o, &z) in out.iter_mut().zip(zs) {
                    *o = classic_search(self.partition, z);
                }
            }
            Prepared::Bitset1(probe) => {
                let n = self.partition.intervals();
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        let mut k = *probe;
                        loop {
                            for l in 0..D {
                                let r = i[l] | k;
                                if r < n {
                                    i[l] = advance(i[l], k, z[l] >= x[r]);
                                }
                            }
                            k >>= 1;
                            if k == 0 {
                                break;
                            }
                        }
                    },
                    |z| bitset_search_v1(self.partition, *probe, z),
                )
            }
            Prepared::Bitset2(pp) => {
                let padded = pp.padded();
                let probe = pp.probe();
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        let mut k = probe;
                        loop {
                            for l in 0..D {
                                i[l] = advance(i[l], k, z[l] >= padded[i[l] | k]);
                            }
                            k >>= 1;
                            if k == 0 {
                                break;
                            }
                        }
                    },
                    |z| bitset_search_v2(pp, z),
                )
            }
            Prepared::Bitset3(probe) => {
                let n = self.partition.intervals();
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        let mut k = *probe;
                        loop {
                            for l in 0..D {
                                i[l] = advance(i[l], k, z[l] >= x[(i[l] | k).min(n)]);
                            }
                            k >>= 1;
                            if k == 0 {
                                break;
                            }
                        }
                    },
                    |z| bitset_search_v3(self.partition, *probe, z),
                )
            }
            Prepared::Offset(c) => drive::<T, D>(
                zs,
                out,
                |z, i| {
                    for l in 0..D {
                        i[l] = advance(0, c.first, z[l] >= x[c.first]);
                    }
                    let mut size = c.size;
                    for _ in 0..c.iterations {
                        let half = size >> 1;
                        for l in 0..D {
                            i[l] = advance(i[l], half, z[l] >= x[i[l] + half]);
                        }
                        size -= half;
                    }
                },
                |z| offset_search(self.partition, *c, z),
            ),
            Prepared::Eytzinger(lay) => {
                let tree = lay.tree();
                let depth = lay.depth();
                let leaf = 1usize << depth;
                drive::<T, D>(
                    zs,
                    out,
                    |z, k| {
                        for _ in 0..depth {
                            for l in 0..D {
                                k[l] = 2 * k[l] + 1 + (z[l] >= tree[k[l]]) as usize;
                            }
                        }
                        for kl in k.iter_mut() {
                            *kl -= leaf;
                        }
                    },
                    |z| eytzinger_search(lay, z),
                )
            }
            Prepared::Direct(idx) => {
                let table = idx.table();
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        for l in 0..D {
                            let t = table[idx.bucket(z[l])] as usize;
                            i[l] = t - (z[l] < x[t]) as usize;
                        }
                    },
                    |z| direct_search(idx, self.partition, z),
                )
            }
            Prepared::DirectGap2(idx) => {
                let table = idx.table();
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        for l in 0..D {
                            let t = table[idx.bucket(z[l])] as usize;
                            i[l] = t - (z[l] < x[t]) as usize - (z[l] < x[t.saturating_sub(1)]) as usize;
                        }
                    },
                    |z| direct_search_gap2(idx, self.partition, z),
                )
            }
            Prepared::DirectCache(idx) => {
                let fused = idx.fused().expect("cache kernel built with fused pairs");
                drive::<T, D>(
                    zs,
                    out,
                    |z, i| {
                        for l in 0..D {
                            let pair = fused[idx.bucket(z[l])];
                            i[l] = pair.index as usize - (z[l] < pair.value) as usize;
                        }
                    },
                    |z| direct_search_cache(idx, z),
                )
            }
        }
    }
}

#[inline(always)]
fn drive<T: Real, const D: usize>(
    zs: &[T],
    out: &mut [usize],
    lanes: impl Fn(&[T; D], &mut [usize; D]),
    scalar: impl Fn(T) -> usize,
) {
    let mut zc = zs.chunks_exact(D);
    let mut oc = out.chunks_exact_mut(D);
    for (z, o) in (&mut zc).zip(&mut oc) {
        let z: &[T; D] = z.try_into().expect("chunk of D");
        let o: &mut [usize; D] = o.try_into().expect("chunk of D");
        *o = [0; D];
        lanes(z, o);
    }
    for (o, &z) in oc.into_remainder().iter_mut().zip(zc.remainder()) {
        *o = scalar(z);
    }
}

/// A searcher plus the lane width `d` to run it at.
#[derive(Clone, Copy, Debug)]
pub struct LaneConfig<'s, 'a, T: Real> {
    searcher: &'s Searcher<'a, T>,
    lanes: usize,
}

impl<'s, 'a, T: Real> LaneConfig<'s, 'a, T> {
    /// `lanes` must be one of [`Real::LANE_WIDTHS`] for `T`.
    pub fn new(searcher: &'s Searcher<'a, T>, lanes: usize) -> Result<Self> {
        if !T::LANE_WIDTHS.contains(&lanes) {
            return Err(Error::UnsupportedLanes(lanes));
        }
        Ok(LaneConfig { searcher, lanes })
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn kernel(&self) -> Kernel {
        self.searcher.kernel()
    }

    pub fn searcher(&self) -> &'s Searcher<'a, T> {
        self.searcher
    }
}

/// Resolves every query of a batch already validated for this partition.
/// Returns the number of indices written to `out[..M]`.
pub fn batch_search<T: Real>(cfg: &LaneConfig<'_, '_, T>, queries: &QueryBatch<T>, out: &mut [usize]) -> Result<usize> {
    if !queries.targets(cfg.searcher.partition) {
        return Err(Error::InvalidArgument("query batch was validated against a different partition"));
    }
    run_checked_capacity(cfg, queries.values(), out)
}

/// Resolves `queries[range]` into `out`, for splitting one batch across workers.
pub fn batch_search_range<T: Real>(
    cfg: &LaneConfig<'_, '_, T>,
    queries: &QueryBatch<T>,
    range: Range<usize>,
    out: &mut [usize],
) -> Result<usize> {
    if !queries.targets(cfg.searcher.partition) {
        return Err(Error::InvalidArgument("query batch was validated against a different partition"));
    }
    let Some(zs) = queries.values().get(range) else {
        return Err(Error::InvalidArgument("range outside query batch"));
    };
    run_checked_capacity(cfg, zs, out)
}

/// Like [`batch_search`] for an arbitrary slice; fails with `OutOfDomain(j)` on the
/// first query outside `[X_0, X_N)` before writing anything.
pub fn batch_search_slice<T: Real>(cfg: &LaneConfig<'_, '_, T>, queries: &[T], out: &mut [usize]) -> Result<usize> {
    let p = cfg.searcher.partition;
    if let Some(j) = queries.iter().position(|&z| !p.contains(z)) {
        return Err(Error::OutOfDomain(j));
    }
    run_checked_capacity(cfg, queries, out)
}

fn run_checked_capacity<T: Real>(cfg: &LaneConfig<'_, '_, T>, zs: &[T], out: &mut [usize]) -> Result<usize> {
    if out.len() < zs.len() {
        return Err(Error::InvalidArgument("output shorter than query batch"));
    }
    let out = &mut out[..zs.len()];
    let s = cfg.searcher;
    match cfg.lanes {
        1 => s.run::<1>(zs, out),
        2 => s.run::<2>(zs, out),
        4 => s.run::<4>(zs, out),
        8 => s.run::<8>(zs, out),
        16 => s.run::<16>(zs, out),
        d => return Err(Error::UnsupportedLanes(d)),
    }
    Ok(zs.len())
}
