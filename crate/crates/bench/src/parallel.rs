//! Splitting one query batch across worker threads.

use std::thread;

use fastsearch_core::{batch_search_range, LaneConfig, QueryBatch, Real, Result};

/// Environment variable that overrides the batch thread count.
pub const THREADS_ENV: &str = "FASTSEARCH_THREADS";

/// `FASTSEARCH_THREADS` if set to a positive integer, else `requested`, else 1.
pub fn thread_count(requested: Option<usize>) -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .or(requested)
        .unwrap_or(1)
        .max(1)
}

/// Same output as [`fastsearch_core::batch_search`]; `out[j]` is always query `j`'s answer.
pub fn par_batch_search<T: Real>(
    cfg: &LaneConfig<'_, '_, T>,
    queries: &QueryBatch<T>,
    out: &mut [usize],
    threads: usize,
) -> Result<usize> {
    let m = queries.len();
    if out.len() < m {
        return Err(fastsearch_core::Error::InvalidArgument("output shorter than query batch"));
    }
    let threads = threads.clamp(1, m.max(1));
    if threads == 1 {
        return fastsearch_core::batch_search(cfg, queries, out);
    }
    let chunk = m.div_ceil(threads);
    thread::scope(|s| {
        let workers: Vec<_> = out[..m]
            .chunks_mut(chunk)
            .enumerate()
            .map(|(w, o)| {
                let start = w * chunk;
                s.spawn(move || batch_search_range(cfg, queries, start..start + o.len(), o))
            })
            .collect();
        workers.into_iter().try_fold(0, |acc, h| Ok(acc + h.join().expect("worker panicked")?))
    })
}
