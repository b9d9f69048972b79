//! Draw-level scheduling.
//!
//! Every Monte Carlo loop in the crate goes through [`map_indexed`], which
//! returns results in index order regardless of the worker count. With the
//! `parallel` feature disabled, or with `workers == 1`, it is a plain
//! sequential loop.

/// Requested degree of parallelism; `0` means "all available cores".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);
    pub const ALL: Workers = Workers(0);

    pub fn is_sequential(self) -> bool {
        self.0 == 1 || !cfg!(feature = "parallel")
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::ALL
    }
}

/// `(0..count).map(f)` collected in order, possibly on several threads.
pub fn map_indexed<T, F>(count: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers.is_sequential() || count <= 1 {
        return (0..count).map(f).collect();
    }
    parallel_map(count, workers, f)
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(count: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if workers.0 == 0 {
        return (0..count).into_par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers.0).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(err) => {
            log::warn!("could not start a {}-thread pool ({err}); running sequentially", workers.0);
            (0..count).map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(count: usize, _workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
