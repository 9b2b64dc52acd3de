//! Point-level parallelism.
//!
//! Sweeps fan out over sample points and nothing else; every per-point
//! computation is sequential inside. Results are collected back in input
//! order and any reduction happens after the collect, so the output is
//! bit-identical whatever the thread count, including the sequential
//! fallback built without the `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over the items, in parallel when the `parallel` feature is
/// enabled.
pub fn map_points<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential variant, kept callable so benchmarks can compare the
/// two code paths in a single build.
pub fn map_points_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Runs `work` on a pool of `jobs` threads when parallelism is compiled in;
/// `jobs = 0` means the default pool size. Without the feature the work runs
/// inline and `jobs` is ignored.
pub fn with_jobs<R: Send>(jobs: usize, work: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            work()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool construction");
            pool.install(work)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        work()
    }
}
