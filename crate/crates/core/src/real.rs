//! The two IEEE-754 storage precisions every algorithm is generic over.

use core::fmt::Debug;
use core::ops::{Add, Mul, Sub};

/// Storage precision tag of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub const fn name(self) -> &'static str {
        match self {
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// A binary floating-point storage type (`f32` or `f64`).
///
/// Arithmetic on `Self` happens in `Self`'s own precision, which is what the
/// rounding analysis of the direct search relies on.
pub trait Real:
    sealed::Sealed
    + Copy
    + Debug
    + Default
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Zero-sized for `f32`, `u32` for `f64`; keeps a fused pair at 8 or 16 bytes.
    type Pad: Copy + Default + Debug + PartialEq + Send + Sync + 'static;

    const PRECISION: Precision;
    const ZERO: Self;
    const ONE: Self;
    /// Unit round-off: `2^-24` for single, `2^-53` for double.
    const ROUND_OFF: Self;
    /// Lane widths accepted by the batch executor for this precision.
    const LANE_WIDTHS: &'static [usize];

    fn is_finite(self) -> bool;
    fn recip(self) -> Self;
    /// Smallest representable value strictly greater than `self`.
    fn next_up(self) -> Self;
    /// Largest representable value strictly smaller than `self`.
    fn next_down(self) -> Self;
    /// Round-toward-zero conversion, saturating at `u64::MAX` (and 0 for NaN).
    fn trunc_u64(self) -> u64;
    fn from_f64(v: f64) -> Self;
    fn from_u64(v: u64) -> Self;
    fn to_f64(self) -> f64;
    /// Raw bit pattern, zero-extended to 64 bits.
    fn to_bits_u64(self) -> u64;
    /// Inverse of [`Real::to_bits_u64`]; `None` if the high bits are set for `f32`.
    fn from_bits_u64(bits: u64) -> Option<Self>;
}

macro_rules! next_after_impl {
    ($t:ty) => {
        fn next_up(self) -> Self {
            if self.is_nan() || self == <$t>::INFINITY {
                return self;
            }
            if self == 0.0 {
                return <$t>::from_bits(1);
            }
            let b = self.to_bits();
            <$t>::from_bits(if self > 0.0 { b + 1 } else { b - 1 })
        }

        fn next_down(self) -> Self {
            if self.is_nan() || self == <$t>::NEG_INFINITY {
                return self;
            }
            if self == 0.0 {
                return -<$t>::from_bits(1);
            }
            let b = self.to_bits();
            <$t>::from_bits(if self > 0.0 { b - 1 } else { b + 1 })
        }
    };
}

impl Real for f32 {
    type Pad = ();

    const PRECISION: Precision = Precision::Single;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const ROUND_OFF: Self = 1.0 / 16_777_216.0;
    const LANE_WIDTHS: &'static [usize] = &[1, 4, 8, 16];

    #[inline(always)]
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    #[inline(always)]
    fn recip(self) -> Self {
        1.0 / self
    }
    next_after_impl!(f32);
    #[inline(always)]
    fn trunc_u64(self) -> u64 {
        self as u64
    }
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline(always)]
    fn from_u64(v: u64) -> Self {
        v as f32
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn to_bits_u64(self) -> u64 {
        self.to_bits() as u64
    }
    fn from_bits_u64(bits: u64) -> Option<Self> {
        u32::try_from(bits).ok().map(f32::from_bits)
    }
}

impl Real for f64 {
    type Pad = u32;

    const PRECISION: Precision = Precision::Double;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const ROUND_OFF: Self = 1.0 / 9_007_199_254_740_992.0;
    const LANE_WIDTHS: &'static [usize] = &[1, 2, 4, 8];

    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline(always)]
    fn recip(self) -> Self {
        1.0 / self
    }
    next_after_impl!(f64);
    #[inline(always)]
    fn trunc_u64(self) -> u64 {
        self as u64
    }
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }
    fn from_bits_u64(bits: u64) -> Option<Self> {
        Some(f64::from_bits(bits))
    }
}

/// `2^exp` as a float of the requested precision (`exp` within the normal range).
pub(crate) fn pow2<T: Real>(exp: i32) -> T {
    T::from_f64(f64::from_bits(((exp + 1023) as u64) << 52))
}

/// `⌊log2 n⌋` for `n ≥ 1`.
#[inline(always)]
pub(crate) const fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_up_and_down_walk_one_ulp() {
        assert_eq!(1.0f64.next_up(), 1.0 + f64::EPSILON);
        assert_eq!(1.0f32.next_up(), 1.0 + f32::EPSILON);
        assert_eq!(1.0f64.next_down(), 1.0 - f64::EPSILON / 2.0);
        assert_eq!(0.0f32.next_up(), f32::from_bits(1));
        assert_eq!(0.0f64.next_down(), -f64::from_bits(1));
        assert_eq!((-1.0f64).next_up(), -1.0 + f64::EPSILON / 2.0);
        assert_eq!(f32::MAX.next_up(), f32::INFINITY);
        assert_eq!(f64::INFINITY.next_up(), f64::INFINITY);
        assert!(f64::NAN.next_up().is_nan());
    }

    #[test]
    fn round_off_constants() {
        assert_eq!(f32::ROUND_OFF, f32::EPSILON / 2.0);
        assert_eq!(f64::ROUND_OFF, f64::EPSILON / 2.0);
    }

    #[test]
    fn pow2_and_log2() {
        assert_eq!(pow2::<f64>(-23), 1.0 / 8_388_608.0);
        assert_eq!(pow2::<f32>(32), 4_294_967_296.0);
        assert_eq!(pow2::<f64>(64), 18_446_744_073_709_551_616.0);
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(8), 3);
        assert_eq!(floor_log2(15), 3);
    }

    #[test]
    fn bits_round_trip() {
        assert_eq!(f32::from_bits_u64(1.5f32.to_bits_u64()), Some(1.5));
        assert_eq!(f32::from_bits_u64(1 << 40), None);
        assert_eq!(f64::from_bits_u64(0.1f64.to_bits_u64()), Some(0.1));
    }
}
