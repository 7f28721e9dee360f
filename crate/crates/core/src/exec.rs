//! Sequential/parallel execution policy.
//!
//! Every data-parallel loop in the crate goes through the helpers here so the
//! same call site can run on the rayon pool or on the current thread. With the
//! `parallel` feature disabled, [`Execution::Parallel`] silently degrades to a
//! sequential loop. Results never depend on the policy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether parallel execution is actually compiled in and requested.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly on the rayon pool. Output order is the
/// index order either way.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly on the rayon pool.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
