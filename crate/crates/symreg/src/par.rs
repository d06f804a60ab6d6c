//! Batch mapping with an optional rayon-backed data-parallel path.
//!
//! Results always come back in input order, so archive updates stay
//! bit-reproducible regardless of worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Size the global worker pool. Effective only before first parallel use;
/// a no-op without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn configure_workers(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn configure_workers(_n: usize) {}

/// Sequential fallback, always available (also used by the benchmarks).
pub fn map_batch_serial<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    map_batch_serial(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_serial_agree_in_order() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(map_batch(&items, f), map_batch_serial(&items, f));
    }
}
