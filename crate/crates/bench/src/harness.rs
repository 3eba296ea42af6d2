//! Throughput and setup-cost measurements.
//!
//! Every throughput row is preceded by a full comparison of the kernel's batch output against
//! the classic bisection and a sampled comparison against the linear-scan oracle; a mismatch
//! aborts the run. Timing follows a warm-up pass, then `reps` measurements of at least
//! `min_time` each (the batch is repeated `passes` times to reach it), and reports the median.

use std::cmp::Ordering;
use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use fastsearch_core::direct::{build_index, compute_h_r, DEFAULT_QBITS};
use fastsearch_core::{
    batch_search, gen_queries, gen_uniform_gap_partition, linear_scan_oracle, Error as CoreError, Kernel, LaneConfig,
    Precision, QueryBatch, Real, Searcher, SortedPartition,
};

use crate::parallel::par_batch_search;
use crate::report::ReportRow;
use crate::stats::{median, Summary};

/// Gap range of the generated partitions.
pub const GAP_RANGE: (f64, f64) = (1.0, 5.0);
/// Array sizes `2^P - 1` for `P` in 4, 8, 12, 16, 20.
pub const DEFAULT_SIZES: [usize; 5] = [15, 255, 4095, 65535, 1_048_575];
pub const DEFAULT_QUERIES: usize = 1 << 20;
pub const DEFAULT_REPS: usize = 5;
pub const DEFAULT_MIN_TIME: Duration = Duration::from_millis(100);
/// Queries per configuration compared against the linear-scan oracle.
const ORACLE_SAMPLES: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{kernel} (d={lanes}) disagrees with the oracle at size {size}, query {query}: got {got}, want {want}")]
    Mismatch { kernel: Kernel, size: usize, lanes: usize, query: usize, got: usize, want: usize },
}

pub fn parse_precision(s: &str) -> Result<Precision, String> {
    match s {
        "single" | "f32" => Ok(Precision::Single),
        "double" | "f64" => Ok(Precision::Double),
        other => Err(format!("unknown precision `{other}` (expected single or double)")),
    }
}

#[derive(Clone, Debug)]
pub struct ThroughputConfig {
    pub sizes: Vec<usize>,
    pub precisions: Vec<Precision>,
    pub kernels: Vec<Kernel>,
    pub lanes: Vec<usize>,
    pub queries: usize,
    pub seed: u64,
    pub reps: usize,
    /// Worker threads per batch; 1 times the kernel on the calling thread only.
    pub threads: usize,
    pub min_time: Duration,
}

impl Default for ThroughputConfig {
    fn default() -> Self {
        ThroughputConfig {
            sizes: DEFAULT_SIZES.to_vec(),
            precisions: vec![Precision::Single],
            kernels: Kernel::ALL.to_vec(),
            lanes: vec![1, 4, 8],
            queries: DEFAULT_QUERIES,
            seed: 42,
            reps: DEFAULT_REPS,
            threads: 1,
            min_time: DEFAULT_MIN_TIME,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThroughputRow {
    pub kernel: Kernel,
    pub precision: Precision,
    pub lanes: usize,
    pub size: usize,
    pub threads: usize,
    pub queries: usize,
    pub repetitions: usize,
    /// Batch passes per measurement.
    pub passes: usize,
    /// Million searches per second, median over the repetitions.
    pub mops: f64,
}

/// A configuration that was not measured.
#[derive(Clone, Debug, PartialEq)]
pub struct Skipped {
    pub kernel: Kernel,
    pub precision: Precision,
    pub size: usize,
    pub lanes: Option<usize>,
    pub cause: CoreError,
}

impl fmt::Display for Skipped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} size {}", self.kernel, self.precision.name(), self.size)?;
        if let Some(d) = self.lanes {
            write!(f, " d={d}")?;
        }
        write!(f, ": {}", self.cause)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThroughputReport {
    pub rows: Vec<ThroughputRow>,
    pub skipped: Vec<Skipped>,
}

/// Deterministic per-stream seed: a splitmix64 finaliser folded over `parts`.
pub fn stream_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed, |acc, &p| {
        let mut z = (acc ^ p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

fn precision_tag(p: Precision) -> u64 {
    match p {
        Precision::Single => 32,
        Precision::Double => 64,
    }
}

/// The partition and query batch measured for one (precision, size) pair.
pub fn workload<T: Real>(
    size: usize,
    queries: usize,
    seed: u64,
) -> Result<(SortedPartition<T>, QueryBatch<T>), CoreError> {
    let tag = precision_tag(T::PRECISION);
    let p = gen_uniform_gap_partition::<T>(size, GAP_RANGE.0, GAP_RANGE.1, stream_seed(seed, &[tag, size as u64, 0]))?;
    let q = gen_queries(&p, queries, stream_seed(seed, &[tag, size as u64, 1]))?;
    Ok((p, q))
}

pub fn run_throughput(cfg: &ThroughputConfig) -> Result<ThroughputReport, BenchError> {
    if cfg.reps == 0 {
        return Err(BenchError::InvalidConfig("repetitions must be at least 1"));
    }
    if cfg.queries == 0 {
        return Err(BenchError::InvalidConfig("query count must be at least 1"));
    }
    if cfg.threads == 0 {
        return Err(BenchError::InvalidConfig("thread count must be at least 1"));
    }
    if cfg.sizes.is_empty() || cfg.precisions.is_empty() || cfg.kernels.is_empty() || cfg.lanes.is_empty() {
        return Err(BenchError::InvalidConfig("sizes, precisions, algorithms and lanes must be non-empty"));
    }
    let mut report = ThroughputReport::default();
    for &precision in &cfg.precisions {
        for &size in &cfg.sizes {
            match precision {
                Precision::Single => throughput_for::<f32>(cfg, size, &mut report)?,
                Precision::Double => throughput_for::<f64>(cfg, size, &mut report)?,
            }
        }
    }
    Ok(report)
}

fn throughput_for<T: Real>(
    cfg: &ThroughputConfig,
    size: usize,
    report: &mut ThroughputReport,
) -> Result<(), BenchError> {
    let (p, q) = workload::<T>(size, cfg.queries, cfg.seed)?;
    let m = q.len();

    let stride = m.div_ceil(ORACLE_SAMPLES.min(m));
    let oracle: Vec<(usize, usize)> = (0..m)
        .step_by(stride)
        .map(|j| Ok((j, linear_scan_oracle(&p, q.values()[j])?)))
        .collect::<Result<_, CoreError>>()?;

    let classic = Searcher::new(Kernel::Classic, &p)?;
    let mut reference = vec![0usize; m];
    batch_search(&LaneConfig::new(&classic, 1)?, &q, &mut reference)?;
    for &(j, want) in &oracle {
        if reference[j] != want {
            return Err(BenchError::Mismatch {
                kernel: Kernel::Classic,
                size,
                lanes: 1,
                query: j,
                got: reference[j],
                want,
            });
        }
    }

    let mut out = vec![0usize; m];
    for &kernel in &cfg.kernels {
        let searcher = match Searcher::new(kernel, &p) {
            Ok(s) => s,
            Err(cause) if kernel.is_direct() => {
                report.skipped.push(Skipped { kernel, precision: T::PRECISION, size, lanes: None, cause });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for &lanes in &cfg.lanes {
            let lc = match LaneConfig::new(&searcher, lanes) {
                Ok(lc) => lc,
                Err(cause) => {
                    report.skipped.push(Skipped { kernel, precision: T::PRECISION, size, lanes: Some(lanes), cause });
                    continue;
                }
            };
            let run = |out: &mut [usize]| {
                par_batch_search(&lc, &q, out, cfg.threads).expect("validated batch");
            };

            out.fill(usize::MAX);
            run(&mut out);
            let check = |j: usize, want: usize| {
                if out[j] == want {
                    Ok(())
                } else {
                    Err(BenchError::Mismatch { kernel, size, lanes, query: j, got: out[j], want })
                }
            };
            for &(j, want) in &oracle {
                check(j, want)?;
            }
            if let Some(j) = (0..m).find(|&j| out[j] != reference[j]) {
                check(j, reference[j])?;
            }

            let (passes, secs) = time_passes(|| run(black_box(&mut out)), cfg.reps, cfg.min_time);
            report.rows.push(ThroughputRow {
                kernel,
                precision: T::PRECISION,
                lanes,
                size,
                threads: cfg.threads,
                queries: m,
                repetitions: cfg.reps,
                passes,
                mops: (m * passes) as f64 / secs / 1e6,
            });
        }
    }
    Ok(())
}

/// Warm-up, calibration to `min_time`, then the median of `reps` timed measurements.
/// Returns the passes per measurement and the median seconds per measurement.
fn time_passes(mut run: impl FnMut(), reps: usize, min_time: Duration) -> (usize, f64) {
    run();
    let t = Instant::now();
    run();
    let one = t.elapsed().as_secs_f64().max(1e-9);
    let passes = ((min_time.as_secs_f64() / one).ceil() as usize).max(1);
    let samples: Vec<f64> = (0..reps)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..passes {
                run();
            }
            t.elapsed().as_secs_f64().max(1e-9)
        })
        .collect();
    (passes, median(&samples).expect("reps >= 1"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetupStatsRow {
    pub size: usize,
    pub precision: Precision,
    pub samples: usize,
    /// Samples whose index could not be built.
    pub infeasible: usize,
    /// Growth steps applied to `H` after the initial estimate.
    pub updates: Option<Summary>,
    /// Setup wall-clock nanoseconds divided by the array size.
    pub ns_per_elem: Option<Summary>,
}

pub fn run_setup_stats(
    sizes: &[usize],
    precision: Precision,
    samples: usize,
    seed: u64,
) -> Result<Vec<SetupStatsRow>, BenchError> {
    if samples == 0 {
        return Err(BenchError::InvalidConfig("sample count must be at least 1"));
    }
    sizes
        .iter()
        .map(|&size| match precision {
            Precision::Single => setup_for::<f32>(size, samples, seed),
            Precision::Double => setup_for::<f64>(size, samples, seed),
        })
        .collect()
}

fn setup_for<T: Real>(size: usize, samples: usize, seed: u64) -> Result<SetupStatsRow, BenchError> {
    let tag = precision_tag(T::PRECISION);
    let mut updates = Vec::with_capacity(samples);
    let mut ns = Vec::with_capacity(samples);
    let mut infeasible = 0;
    for s in 0..samples {
        let p = gen_uniform_gap_partition::<T>(
            size,
            GAP_RANGE.0,
            GAP_RANGE.1,
            stream_seed(seed, &[tag, size as u64, 2, s as u64]),
        )?;
        let t = Instant::now();
        let built = compute_h_r(&p, DEFAULT_QBITS, 1).map(|sol| {
            let idx = build_index(&p, &sol);
            (sol.stats.increments, black_box(idx))
        });
        let elapsed = t.elapsed();
        match built {
            Ok((inc, _)) => {
                updates.push(inc as f64);
                ns.push(elapsed.as_nanos() as f64 / size as f64);
            }
            Err(_) => infeasible += 1,
        }
    }
    Ok(SetupStatsRow {
        size,
        precision: T::PRECISION,
        samples,
        infeasible,
        updates: Summary::of(&updates),
        ns_per_elem: Summary::of(&ns),
    })
}

fn kernel_rank(k: Kernel) -> usize {
    Kernel::ALL.iter().position(|&x| x == k).expect("listed kernel")
}

fn precision_rank(p: Precision) -> u8 {
    match p {
        Precision::Single => 0,
        Precision::Double => 1,
    }
}

impl ReportRow for ThroughputRow {
    const COLUMNS: &'static [&'static str] =
        &["algorithm", "precision", "lanes", "size", "threads", "queries", "repetitions", "passes", "mops"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.kernel.name().to_string(),
            self.precision.name().to_string(),
            self.lanes.to_string(),
            self.size.to_string(),
            self.threads.to_string(),
            self.queries.to_string(),
            self.repetitions.to_string(),
            self.passes.to_string(),
            format!("{:.2}", self.mops),
        ]
    }

    fn order(&self, other: &Self) -> Ordering {
        let key = |r: &Self| (kernel_rank(r.kernel), r.size, precision_rank(r.precision), r.lanes, r.threads);
        key(self).cmp(&key(other))
    }
}

fn summary_cells(s: &Option<Summary>, digits: usize) -> [String; 4] {
    match s {
        Some(s) => [s.mean, s.min, s.max, s.stdev].map(|v| format!("{v:.digits$}")),
        None => Default::default(),
    }
}

impl ReportRow for SetupStatsRow {
    const COLUMNS: &'static [&'static str] = &[
        "size",
        "precision",
        "samples",
        "infeasible",
        "updates_mean",
        "updates_min",
        "updates_max",
        "updates_stdev",
        "ns_per_elem_mean",
        "ns_per_elem_min",
        "ns_per_elem_max",
        "ns_per_elem_stdev",
    ];

    fn cells(&self) -> Vec<String> {
        let mut c = vec![
            self.size.to_string(),
            self.precision.name().to_string(),
            self.samples.to_string(),
            self.infeasible.to_string(),
        ];
        c.extend(summary_cells(&self.updates, 4));
        c.extend(summary_cells(&self.ns_per_elem, 2));
        c
    }

    fn order(&self, other: &Self) -> Ordering {
        let key = |r: &Self| (r.size, precision_rank(r.precision));
        key(self).cmp(&key(other))
    }
}

pub fn parse_kernel(s: &str) -> Result<Kernel, String> {
    Kernel::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Kernel::ALL.iter().map(|k| k.name()).collect();
        format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
    })
}
