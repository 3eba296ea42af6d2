use std::process::Command;

use fastsearch_bench::index_file::load_index_as;

fn fastsearch(args: &[&str]) -> (i32, String, String) {
    let out =
        Command::new(env!("CARGO_BIN_EXE_fastsearch")).args(args).env_remove("FASTSEARCH_THREADS").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn throughput_csv() {
    let (code, out, _) = fastsearch(&[
        "bench",
        "throughput",
        "--sizes",
        "15,255",
        "--algos",
        "classic,direct",
        "--lanes",
        "1,4",
        "--queries",
        "1000",
        "--reps",
        "1",
        "--min-time-ms",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "algorithm,precision,lanes,size,threads,queries,repetitions,passes,mops");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].starts_with("classic,single,1,15,1,1000,1,"));
}

#[test]
fn throughput_threads_flag() {
    let (code, out, _) = fastsearch(&[
        "bench",
        "throughput",
        "--sizes",
        "255",
        "--algos",
        "eytzinger",
        "--lanes",
        "8",
        "--queries",
        "5000",
        "--reps",
        "1",
        "--min-time-ms",
        "1",
        "--threads",
        "2",
        "--precision",
        "double",
        "--format",
        "md",
    ]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(2).unwrap().starts_with("| eytzinger | double | 8 | 255 | 2 | 5000 | 1 |"));
}

#[test]
fn setup_stats_md() {
    let (code, out, _) = fastsearch(&["bench", "setup-stats", "--sizes", "15", "--samples", "20", "--format", "md"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("| size | precision | samples | infeasible | updates_mean |"));
    assert!(out.lines().nth(2).unwrap().starts_with("| 15 | single | 20 | 0 | "));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(fastsearch(&["bench", "throughput", "--algos", "mkl"]).0, 1);
    assert_eq!(fastsearch(&["bench", "throughput", "--reps", "0", "--sizes", "15"]).0, 1);
    assert_eq!(fastsearch(&["bench", "frobnicate"]).0, 1);
    assert_eq!(fastsearch(&["bench", "setup-stats", "--precision", "half"]).0, 1);
    assert_eq!(fastsearch(&["--help"]).0, 0);
}

#[test]
fn infeasible_only_sweep_exits_2() {
    let (code, out, err) = fastsearch(&[
        "bench",
        "throughput",
        "--sizes",
        "2",
        "--algos",
        "direct-gap2",
        "--lanes",
        "1",
        "--queries",
        "10",
        "--reps",
        "1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(out.lines().count(), 1);
    assert!(err.contains("skipped direct-gap2 single size 2"));
}

#[test]
fn index_save_load_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    std::fs::write(&csv, "0\n0.5\n0.7\n1.1\n").unwrap();
    let idx = dir.path().join("x.idx");
    let (p, i) = (csv.to_str().unwrap(), idx.to_str().unwrap());

    let (code, out, _) = fastsearch(&["index", "save", "--path", i, "--partition", p, "--precision", "double"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("N=3 R=5"));
    assert_eq!(load_index_as::<f64>(&idx).unwrap().table(), [0, 1, 1, 2, 3, 3]);

    let (code, out, _) = fastsearch(&["index", "load", "--path", i, "--partition", p, "--queries", "500"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("precision=double N=3 R=5 gap=1 qbits=32"));
    assert!(out.contains("verified 500 queries"));

    let other = dir.path().join("y.csv");
    std::fs::write(&other, "0\n0.5\n0.7\n1.2\n").unwrap();
    assert_eq!(fastsearch(&["index", "load", "--path", i, "--partition", other.to_str().unwrap()]).0, 1);
}

#[test]
fn index_gap2_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    std::fs::write(&csv, "-1e9\n0\n1\n1e9\n").unwrap();
    let idx = dir.path().join("x.idx");
    let (p, i) = (csv.to_str().unwrap(), idx.to_str().unwrap());

    // knots 0 and 1 collide after subtracting X_0 in single precision
    assert_eq!(fastsearch(&["index", "save", "--path", i, "--partition", p]).0, 2);
    assert_eq!(fastsearch(&["index", "save", "--path", i, "--partition", p, "--gap", "2"]).0, 0);
    let (code, out, _) = fastsearch(&["index", "load", "--path", i, "--partition", p]);
    assert_eq!(code, 0);
    assert!(out.contains("gap=2"));

    let mut bytes = std::fs::read(&idx).unwrap();
    bytes[50] ^= 1;
    std::fs::write(&idx, &bytes).unwrap();
    let (code, _, err) = fastsearch(&["index", "load", "--path", i]);
    assert_eq!(code, 3);
    assert!(err.contains("checksum"));

    assert_eq!(fastsearch(&["index", "load", "--path", dir.path().join("missing").to_str().unwrap()]).0, 3);
    std::fs::write(&csv, "0\n2\n1\n").unwrap();
    assert_eq!(fastsearch(&["index", "save", "--path", i, "--partition", p]).0, 1);
}
