//! Index-ordered parallel map. Results come back in index order whatever the
//! worker count, and every reduction over them happens sequentially.

#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Sets the global worker count. Later calls after the pool exists fail
/// silently, which leaves the first setting in place.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) {}
