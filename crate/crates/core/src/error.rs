use core::fmt;

/// Everything that can go wrong while validating inputs or building a search structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Error {
    /// Fewer than two knots; a partition needs at least one interval.
    TooShort,
    /// `values[pos - 1] >= values[pos]`.
    NotStrictlyIncreasing(usize),
    /// NaN or infinity at the given position.
    NonFinite(usize),
    /// Query at the given position lies outside `[X_0, X_N)`.
    OutOfDomain(usize),
    /// The rounded offsets `m(X_pos - X_0)` and `m(X_{pos-q} - X_0)` compare equal.
    NotDistinguishable(usize),
    /// `⌊H·D_N⌋` does not fit in the bucket index width.
    Overflow,
    /// The partition has too many knots for 32-bit bucket entries.
    TooLarge,
    /// Gap parameter outside what the requested operation supports.
    UnsupportedGap(u8),
    /// Bucket index width other than 32 or 64.
    UnsupportedBits(u8),
    /// Lane width not accepted for this precision.
    UnsupportedLanes(usize),
    /// A raw index does not satisfy the structural invariants of a direct index.
    MalformedIndex(&'static str),
    /// A precondition on a plain argument was violated.
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooShort => f.write_str("partition needs at least two knots"),
            Error::NotStrictlyIncreasing(i) => {
                write!(f, "knot {i} is not strictly greater than knot {}", i - 1)
            }
            Error::NonFinite(i) => write!(f, "value at position {i} is not finite"),
            Error::OutOfDomain(i) => write!(f, "query {i} lies outside [X_0, X_N)"),
            Error::NotDistinguishable(i) => {
                write!(f, "rounded offset of knot {i} is indistinguishable from its predecessor")
            }
            Error::Overflow => f.write_str("bucket count overflows the bucket index width"),
            Error::TooLarge => f.write_str("partition too large for 32-bit bucket entries"),
            Error::UnsupportedGap(q) => write!(f, "unsupported gap parameter {q}"),
            Error::UnsupportedBits(b) => write!(f, "unsupported bucket index width {b}"),
            Error::UnsupportedLanes(d) => write!(f, "unsupported lane width {d}"),
            Error::MalformedIndex(why) => write!(f, "malformed direct index: {why}"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
