//! Throughput and setup-cost harness for the search kernels of `fastsearch-core`,
//! plus the on-disk index format and partition ingestion used by the `fastsearch` CLI.

pub mod harness;
pub mod index_file;
pub mod input;
pub mod parallel;
pub mod report;
pub mod stats;

pub use harness::{
    run_setup_stats, run_throughput, BenchError, SetupStatsRow, Skipped, ThroughputConfig, ThroughputReport,
    ThroughputRow,
};
pub use index_file::{load_index, load_index_as, save_index, IndexFileError, StoredIndex};
pub use report::{emit_report, Format, ReportRow};
pub use stats::Summary;
