//! Order-preserving map over independent work items, on a rayon pool when the
//! `parallel` feature is enabled and more than one job is requested.

/// Applies `f` to every item and returns the results in input order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(jobs: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    if jobs <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
        Err(_) => items.into_iter().map(f).collect(),
    }
}

/// Applies `f` to every item and returns the results in input order.
#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(_jobs: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Whether this build can run work items concurrently.
pub fn available() -> bool {
    cfg!(feature = "parallel")
}
