use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use fastsearch_bench::harness::{parse_kernel, parse_precision, DEFAULT_QUERIES, DEFAULT_SIZES};
use fastsearch_bench::index_file::{load_index, save_index, IndexFileError, StoredIndex};
use fastsearch_bench::input::{read_partition, InputError};
use fastsearch_bench::parallel::thread_count;
use fastsearch_bench::{emit_report, run_setup_stats, run_throughput, BenchError, Format, ThroughputConfig};
use fastsearch_core::direct::{direct_search_gap_q, DEFAULT_QBITS};
use fastsearch_core::{gen_queries, DirectIndex, Kernel, Precision, Real, Searcher};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "fastsearch", version, about = "Sorted-array search benchmarks and index files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark sweeps.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Build, save and inspect direct-search index files.
    #[command(subcommand)]
    Index(IndexCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Searches per second for each algorithm, size and lane width.
    Throughput(ThroughputArgs),
    /// H-update counts and normalized setup time of the direct index.
    SetupStats(SetupArgs),
}

#[derive(Args)]
struct ThroughputArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_precision, default_value = "single")]
    precision: Vec<Precision>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kernel, default_value = "classic,bitset1,bitset2,bitset3,offset,eytzinger,direct,direct-gap2,direct-cache")]
    algos: Vec<Kernel>,
    #[arg(long, value_delimiter = ',', default_value = "1,4,8")]
    lanes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_QUERIES)]
    queries: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, value_parser = Format::from_str, default_value = "csv")]
    format: Format,
    /// Time multi-threaded batches; FASTSEARCH_THREADS overrides the value.
    #[arg(long)]
    threads: Option<usize>,
    /// Minimum wall time per measurement.
    #[arg(long, default_value_t = 100)]
    min_time_ms: u64,
}

#[derive(Args)]
struct SetupArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, value_parser = parse_precision, default_value = "single")]
    precision: Precision,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_parser = Format::from_str, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Build the index of a partition file and write it to --path.
    Save {
        #[arg(long)]
        path: PathBuf,
        /// Text file with one knot per line, strictly increasing.
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, value_parser = parse_precision, default_value = "single")]
        precision: Precision,
        #[arg(long, default_value_t = 1)]
        gap: u8,
        #[arg(long, default_value_t = DEFAULT_QBITS)]
        qbits: u8,
    },
    /// Read an index file, print its header and optionally check it against a partition.
    Load {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Random queries compared against the classic search when --partition is given.
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::new(EXIT_USAGE, e)
    }
}

impl From<IndexFileError> for Failure {
    fn from(e: IndexFileError) -> Self {
        match e {
            IndexFileError::PrecisionMismatch { .. } => Failure::new(EXIT_USAGE, e),
            _ => Failure::new(EXIT_IO, e),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Io(_) => Failure::new(EXIT_IO, e),
            _ => Failure::new(EXIT_USAGE, e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Bench(BenchCommand::Throughput(a)) => throughput(a),
        Command::Bench(BenchCommand::SetupStats(a)) => setup_stats(a),
        Command::Index(c) => index(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fastsearch: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn throughput(a: ThroughputArgs) -> Result<(), Failure> {
    let cfg = ThroughputConfig {
        sizes: a.sizes,
        precisions: a.precision,
        kernels: a.algos,
        lanes: a.lanes,
        queries: a.queries,
        seed: a.seed,
        reps: a.reps,
        threads: thread_count(a.threads),
        min_time: std::time::Duration::from_millis(a.min_time_ms),
    };
    let report = run_throughput(&cfg)?;
    print!("{}", emit_report(&report.rows, a.format));
    for s in &report.skipped {
        eprintln!("skipped {s}");
    }
    if report.rows.is_empty() && !report.skipped.is_empty() {
        return Err(Failure::new(EXIT_INFEASIBLE, "every requested configuration was skipped"));
    }
    Ok(())
}

fn setup_stats(a: SetupArgs) -> Result<(), Failure> {
    let rows = run_setup_stats(&a.sizes, a.precision, a.samples, a.seed)?;
    print!("{}", emit_report(&rows, a.format));
    if rows.iter().all(|r| r.infeasible == r.samples) {
        return Err(Failure::new(EXIT_INFEASIBLE, "no sample produced a feasible index"));
    }
    Ok(())
}

fn index(c: IndexCommand) -> Result<(), Failure> {
    match c {
        IndexCommand::Save { path, partition, precision, gap, qbits } => match precision {
            Precision::Single => save_as::<f32>(&path, &partition, gap, qbits),
            Precision::Double => save_as::<f64>(&path, &partition, gap, qbits),
        },
        IndexCommand::Load { path, partition, queries, seed } => {
            let stored = load_index(&path)?;
            match stored {
                StoredIndex::Single(idx) => show::<f32>(idx, partition, queries, seed),
                StoredIndex::Double(idx) => show::<f64>(idx, partition, queries, seed),
            }
        }
    }
}

fn save_as<T: Real + FromStr>(path: &PathBuf, partition: &PathBuf, gap: u8, qbits: u8) -> Result<(), Failure> {
    let p = read_partition::<T>(partition)?;
    let idx = DirectIndex::new(&p, qbits, gap).map_err(|e| match e {
        fastsearch_core::Error::NotDistinguishable(_) | fastsearch_core::Error::Overflow => {
            Failure::new(EXIT_INFEASIBLE, format!("partition is infeasible: {e}"))
        }
        _ => Failure::new(EXIT_USAGE, e),
    })?;
    let bytes = save_index(&idx, path)?;
    println!(
        "wrote {} ({bytes} bytes): N={} R={} gap={} qbits={}",
        path.display(),
        idx.intervals(),
        idx.r(),
        idx.gap(),
        idx.qbits()
    );
    Ok(())
}

fn show<T: Real + FromStr>(
    idx: DirectIndex<T>,
    partition: Option<PathBuf>,
    queries: usize,
    seed: u64,
) -> Result<(), Failure> {
    println!(
        "precision={} N={} R={} gap={} qbits={} H={:?} X0={:?} table_bytes={}",
        T::PRECISION.name(),
        idx.intervals(),
        idx.r(),
        idx.gap(),
        idx.qbits(),
        idx.h(),
        idx.x0(),
        idx.table_bytes()
    );
    let Some(partition) = partition else { return Ok(()) };
    let p = read_partition::<T>(&partition)?;
    if !idx.fits(&p) {
        return Err(Failure::new(EXIT_USAGE, "index was built for a different partition"));
    }
    let classic = Searcher::new(Kernel::Classic, &p).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let q = gen_queries(&p, queries, seed).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    if let Some(j) = q.values().iter().position(|&z| direct_search_gap_q(&idx, &p, z) != classic.resolve(z)) {
        return Err(Failure::new(EXIT_USAGE, format!("index disagrees with the partition at query {j}")));
    }
    println!("verified {} queries against {}", q.len(), partition.display());
    Ok(())
}
