//! Lower-bound search over sorted floating-point partitions.
//!
//! Given strictly increasing knots `X_0 < ... < X_N` and a query `z` in `[X_0, X_N)`,
//! every kernel here returns the largest `i` with `X_i <= z`:
//!
//! - [`binsearch`]: classic bisection, three bit-set variants with a fixed iteration
//!   count, and an offset-based branch-free search.
//! - [`eytzinger`]: heap-ordered layout padded to a complete tree.
//! - [`direct`]: O(1) search through a bucket index, including the rounding-aware
//!   construction of its scale factor, a gap-2 variant and a cache-fused variant.
//! - [`batch`]: lock-step execution of `d` queries at a time with results independent of `d`.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod aligned;
pub mod batch;
pub mod binsearch;
pub mod direct;
pub mod error;
pub mod eytzinger;
pub mod keys;
pub mod partition;
pub mod real;

pub use batch::{batch_search, batch_search_range, batch_search_slice, Kernel, LaneConfig, Searcher};
pub use direct::{build_index, compute_h_r, DirectIndex, HGrowthStats, HrSolution};
pub use error::{Error, Result};
pub use eytzinger::{build_layout, EytzingerLayout};
pub use partition::{
    gen_queries, gen_uniform_gap_partition, linear_scan_oracle, pad_right_pow2, validate_partition, PaddedPartition,
    QueryBatch, SortedPartition,
};
pub use real::{Precision, Real};
