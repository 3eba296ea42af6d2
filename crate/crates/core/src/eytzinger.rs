//! Eytzinger (heap order) layout of a partition, padded with `X_N` to a complete
//! tree of `2^L - 1` nodes, and its fixed-depth branch-free descent.
//!
//! Node `k` (0-based) has children `2k + 1` and `2k + 2`. After `L` steps the
//! descent sits at virtual leaf `2^L - 1 + r`, where `r` counts the padded keys
//! `<= z`; since `X_0 <= z < X_N` that count is `answer + 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::keys::Keys;
use crate::partition::SortedPartition;
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct EytzingerLayout<T: Real> {
    tree: Vec<T>,
    depth: u32,
    knots: usize,
}

impl<T: Real> EytzingerLayout<T> {
    #[inline(always)]
    pub fn tree(&self) -> &[T] {
        &self.tree
    }

    /// Tree depth `L`; also the number of comparisons per search.
    #[inline(always)]
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of knots `N + 1` of the source partition.
    pub fn knots(&self) -> usize {
        self.knots
    }

    pub fn padding(&self) -> usize {
        self.tree.len() - self.knots
    }

    /// In-order traversal: the sorted knots followed by the padding copies of `X_N`.
    pub fn in_order(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.tree.len());
        let mut stack = Vec::with_capacity(self.depth as usize + 1);
        let mut k = 0usize;
        loop {
            while k < self.tree.len() {
                stack.push(k);
                k = 2 * k + 1;
            }
            match stack.pop() {
                Some(top) => {
                    out.push(self.tree[top]);
                    k = 2 * top + 2;
                }
                None => return out,
            }
        }
    }
}

/// Smallest `L` with `2^L - 1 >= knots`.
pub fn layout_depth(knots: usize) -> u32 {
    let mut depth = 1;
    while (1usize << depth) - 1 < knots {
        depth += 1;
    }
    depth
}

pub fn build_layout<T: Real>(p: &SortedPartition<T>) -> EytzingerLayout<T> {
    let knots = p.values().len();
    let depth = layout_depth(knots);
    let size = (1usize << depth) - 1;
    let mut sorted = Vec::with_capacity(size);
    sorted.extend_from_slice(p.values());
    sorted.resize(size, p.last());

    let mut tree = vec![T::ZERO; size];
    let mut next = 0usize;
    fill(&mut tree, &sorted, 0, &mut next);
    debug_assert_eq!(next, size);
    EytzingerLayout { tree, depth, knots }
}

fn fill<T: Real>(tree: &mut [T], sorted: &[T], k: usize, next: &mut usize) {
    if k >= tree.len() {
        return;
    }
    fill(tree, sorted, 2 * k + 1, next);
    tree[k] = sorted[*next];
    *next += 1;
    fill(tree, sorted, 2 * k + 2, next);
}

#[inline]
pub fn eytzinger_search<T: Real>(lay: &EytzingerLayout<T>, z: T) -> usize {
    eytzinger_search_in(lay.tree(), lay.depth(), z)
}

#[inline]
pub fn eytzinger_search_in<T: Real, K: Keys<T> + ?Sized>(tree: &K, depth: u32, z: T) -> usize {
    let mut k = 0usize;
    for _ in 0..depth {
        tree.step();
        k = 2 * k + 1 + (z >= tree.get(k)) as usize;
    }
    k - (1usize << depth)
}
