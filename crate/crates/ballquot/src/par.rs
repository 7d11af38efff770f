//! Execution policy shared by the quadrature, sampling and search kernels.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it every policy runs on the calling thread. Results never depend on
//! the policy: maps preserve input order and reductions go through
//! [`pairwise_sum`].

/// How a data-parallel kernel should run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    /// Run on the calling thread.
    Sequential,
    /// Use the rayon pool when compiled with the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// True when this policy will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Pairwise (cascade) summation. The association tree depends only on the
/// slice length, so the result is bit-identical across execution policies.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().fold(0.0, |acc, x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
