//! Read access to the knot arrays the comparison kernels probe.
//!
//! Kernels are written against [`Keys`] rather than `&[T]` so a test can wrap the
//! array to count iterations and catch any read outside the allowed range.

use crate::real::Real;

#[allow(clippy::len_without_is_empty)]
pub trait Keys<T: Real> {
    fn len(&self) -> usize;

    fn get(&self, i: usize) -> T;

    /// Called once per loop iteration of a fixed-iteration kernel.
    #[inline(always)]
    fn step(&self) {}
}

impl<T: Real> Keys<T> for [T] {
    #[inline(always)]
    fn len(&self) -> usize {
        <[T]>::len(self)
    }

    #[inline(always)]
    fn get(&self, i: usize) -> T {
        self[i]
    }
}
