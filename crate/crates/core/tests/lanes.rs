//! Batch results are independent of the lane width and match the scalar kernels.

use fastsearch_core::{
    batch_search, gen_queries, gen_uniform_gap_partition, linear_scan_oracle, Kernel, LaneConfig, Real, Searcher,
};

fn lane_invariance<T: Real>() {
    for size in [2usize, 3, 15, 100, 255, 4095] {
        let p = gen_uniform_gap_partition::<T>(size, 1.0, 5.0, size as u64).unwrap();
        // odd count so every width exercises its remainder path
        let q = gen_queries(&p, 10_007, 4).unwrap();
        for kernel in Kernel::ALL {
            if kernel == Kernel::DirectGap2 && size < 3 {
                continue;
            }
            let s = Searcher::new(kernel, &p).unwrap();
            let mut reference = vec![0usize; q.len()];
            batch_search(&LaneConfig::new(&s, 1).unwrap(), &q, &mut reference).unwrap();
            for (j, &z) in q.values().iter().enumerate().step_by(7) {
                assert_eq!(reference[j], linear_scan_oracle(&p, z).unwrap(), "{kernel} size {size}");
                assert_eq!(reference[j], s.resolve(z));
            }
            for &d in T::LANE_WIDTHS {
                let mut out = vec![usize::MAX; q.len()];
                let written = batch_search(&LaneConfig::new(&s, d).unwrap(), &q, &mut out).unwrap();
                assert_eq!(written, q.len());
                assert_eq!(out, reference, "{kernel} d={d} size {size}");
            }
        }
    }
}

#[test]
fn lane_invariance_single() {
    lane_invariance::<f32>();
}

#[test]
fn lane_invariance_double() {
    lane_invariance::<f64>();
}

#[test]
fn gap2_needs_two_intervals() {
    let p = gen_uniform_gap_partition::<f64>(2, 1.0, 5.0, 1).unwrap();
    assert!(Searcher::new(Kernel::DirectGap2, &p).is_err());
}

#[test]
fn range_search_matches_whole_batch() {
    use fastsearch_core::batch_search_range;
    let p = gen_uniform_gap_partition::<f32>(255, 1.0, 5.0, 5).unwrap();
    let q = gen_queries(&p, 1000, 6).unwrap();
    let s = Searcher::new(Kernel::Eytzinger, &p).unwrap();
    let cfg = LaneConfig::new(&s, 8).unwrap();
    let mut whole = vec![0; q.len()];
    batch_search(&cfg, &q, &mut whole).unwrap();
    let mut part = vec![0; 300];
    assert_eq!(batch_search_range(&cfg, &q, 101..401, &mut part).unwrap(), 300);
    assert_eq!(part, whole[101..401]);
    assert!(batch_search_range(&cfg, &q, 900..1001, &mut part).is_err());
}
