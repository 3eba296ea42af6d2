use std::time::Duration;

use fastsearch_bench::harness::{run_setup_stats, run_throughput, stream_seed, workload, BenchError, ThroughputConfig};
use fastsearch_bench::parallel::{par_batch_search, thread_count, THREADS_ENV};
use fastsearch_bench::report::{emit_report, Format, ReportRow};
use fastsearch_bench::ThroughputRow;
use fastsearch_core::{batch_search, Kernel, LaneConfig, Precision, Searcher};

fn quick(kernels: Vec<Kernel>, sizes: Vec<usize>) -> ThroughputConfig {
    ThroughputConfig {
        sizes,
        kernels,
        lanes: vec![1, 4],
        queries: 4096,
        reps: 2,
        min_time: Duration::from_millis(1),
        ..ThroughputConfig::default()
    }
}

/// Everything except the timing columns.
fn fixed_columns(rows: &[ThroughputRow]) -> String {
    let text = emit_report(rows, Format::Csv);
    text.lines().map(|l| l.rsplitn(3, ',').nth(2).unwrap_or(l).to_string()).collect::<Vec<_>>().join("\n")
}

#[test]
fn zero_repetitions_rejected() {
    let mut cfg = quick(vec![Kernel::Classic], vec![15]);
    cfg.reps = 0;
    assert!(matches!(run_throughput(&cfg), Err(BenchError::InvalidConfig(_))));
    cfg.reps = 1;
    cfg.queries = 0;
    assert!(matches!(run_throughput(&cfg), Err(BenchError::InvalidConfig(_))));
}

#[test]
fn rows_cover_the_grid() {
    let mut cfg = quick(Kernel::ALL.to_vec(), vec![15, 255]);
    cfg.precisions = vec![Precision::Single, Precision::Double];
    cfg.lanes = vec![1, 2, 16];
    let report = run_throughput(&cfg).unwrap();
    // d=2 only exists for double, d=16 only for single
    assert_eq!(report.rows.len(), 9 * 2 * 2 * 2);
    assert_eq!(report.skipped.len(), 9 * 2 * 2);
    assert!(report.rows.iter().all(|r| r.mops > 0.0 && r.queries == 4096 && r.repetitions == 2 && r.passes >= 1));
    assert!(report.skipped.iter().all(|s| s.lanes.is_some()));
}

#[test]
fn infeasible_direct_rows_are_skipped_not_fatal() {
    let report = run_throughput(&quick(vec![Kernel::Classic, Kernel::DirectGap2], vec![2])).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.skipped.len(), 1);
    let s = &report.skipped[0];
    assert_eq!((s.kernel, s.size, s.lanes), (Kernel::DirectGap2, 2, None));
    assert!(s.to_string().starts_with("direct-gap2 single size 2"));
}

#[test]
fn non_timing_columns_are_deterministic() {
    let cfg = quick(vec![Kernel::Direct, Kernel::Classic, Kernel::Eytzinger], vec![255, 15]);
    let a = run_throughput(&cfg).unwrap();
    let b = run_throughput(&cfg).unwrap();
    assert_eq!(fixed_columns(&a.rows), fixed_columns(&b.rows));
    let text = emit_report(&a.rows, Format::Csv);
    let order: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(order, ["classic"; 4].into_iter().chain(["eytzinger"; 4]).chain(["direct"; 4]).collect::<Vec<_>>());
    assert_eq!(text.lines().next().unwrap(), ThroughputRow::COLUMNS.join(","));
}

#[test]
fn workload_depends_only_on_seed() {
    let (p1, q1) = workload::<f32>(255, 100, 9).unwrap();
    let (p2, q2) = workload::<f32>(255, 100, 9).unwrap();
    assert_eq!(p1.values(), p2.values());
    assert_eq!(q1.values(), q2.values());
    let (p3, _) = workload::<f32>(255, 100, 10).unwrap();
    assert_ne!(p1.values(), p3.values());
    assert_ne!(stream_seed(1, &[2, 3]), stream_seed(1, &[3, 2]));
}

#[test]
fn setup_stats_rows() {
    let rows = run_setup_stats(&[255, 15], Precision::Double, 50, 3).unwrap();
    assert_eq!(rows.iter().map(|r| r.size).collect::<Vec<_>>(), [255, 15]);
    for r in &rows {
        assert_eq!((r.samples, r.infeasible), (50, 0));
        let u = r.updates.unwrap();
        let t = r.ns_per_elem.unwrap();
        assert!(u.min <= u.mean && u.mean <= u.max && u.stdev >= 0.0);
        assert!(t.min <= t.mean && t.mean <= t.max && t.min > 0.0);
    }
    let md = emit_report(&rows, Format::Markdown);
    assert!(md.lines().nth(2).unwrap().starts_with("| 15 | double | 50 | 0 |"));
    assert!(matches!(run_setup_stats(&[15], Precision::Single, 0, 1), Err(BenchError::InvalidConfig(_))));
}

#[test]
fn threaded_batches_keep_query_order() {
    let (p, q) = workload::<f64>(4095, 10_007, 1).unwrap();
    for kernel in [Kernel::Bitset2, Kernel::DirectCache] {
        let s = Searcher::new(kernel, &p).unwrap();
        let cfg = LaneConfig::new(&s, 4).unwrap();
        let mut one = vec![0; q.len()];
        batch_search(&cfg, &q, &mut one).unwrap();
        for threads in [2, 3, 8, 20_000] {
            let mut many = vec![usize::MAX; q.len()];
            assert_eq!(par_batch_search(&cfg, &q, &mut many, threads).unwrap(), q.len());
            assert_eq!(many, one);
        }
    }
}

#[test]
fn thread_count_env_override() {
    // the only test touching the variable
    std::env::remove_var(THREADS_ENV);
    assert_eq!(thread_count(None), 1);
    assert_eq!(thread_count(Some(3)), 3);
    std::env::set_var(THREADS_ENV, "5");
    assert_eq!(thread_count(Some(3)), 5);
    std::env::set_var(THREADS_ENV, "zero");
    assert_eq!(thread_count(Some(3)), 3);
    std::env::remove_var(THREADS_ENV);
}
