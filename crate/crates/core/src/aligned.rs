//! A fixed-length, heap-allocated buffer aligned to 32 bytes.

use alloc::alloc::{alloc, dealloc, handle_alloc_error, Layout};
use core::ops::Deref;
use core::ptr::NonNull;

use crate::real::Real;

pub const ALIGN: usize = 32;

/// Immutable float buffer whose first element sits on a 32-byte boundary.
pub struct AlignedBuf<T: Real> {
    ptr: NonNull<T>,
    len: usize,
}

// SAFETY: the buffer owns its allocation and `T` is a plain float.
unsafe impl<T: Real> Send for AlignedBuf<T> {}
unsafe impl<T: Real> Sync for AlignedBuf<T> {}

impl<T: Real> AlignedBuf<T> {
    fn layout(len: usize) -> Layout {
        Layout::from_size_align(len * core::mem::size_of::<T>(), ALIGN).expect("buffer too large")
    }

    pub fn from_slice(src: &[T]) -> Self {
        let len = src.len();
        if len == 0 {
            return AlignedBuf { ptr: NonNull::dangling(), len };
        }
        let layout = Self::layout(len);
        // SAFETY: layout has non-zero size; the fresh allocation is fully initialized by the
        // copy before any read.
        unsafe {
            let raw = alloc(layout) as *mut T;
            let Some(ptr) = NonNull::new(raw) else { handle_alloc_error(layout) };
            core::ptr::copy_nonoverlapping(src.as_ptr(), ptr.as_ptr(), len);
            AlignedBuf { ptr, len }
        }
    }
}

impl<T: Real> Deref for AlignedBuf<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        // SAFETY: `ptr` is valid for `len` initialized elements (or dangling with len 0).
        unsafe { core::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }
}

impl<T: Real> Clone for AlignedBuf<T> {
    fn clone(&self) -> Self {
        Self::from_slice(self)
    }
}

impl<T: Real> core::fmt::Debug for AlignedBuf<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl<T: Real> Drop for AlignedBuf<T> {
    fn drop(&mut self) {
        if self.len != 0 {
            // SAFETY: allocated in `from_slice` with this exact layout.
            unsafe { dealloc(self.ptr.as_ptr() as *mut u8, Self::layout(self.len)) }
        }
    }
}
