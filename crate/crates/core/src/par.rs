//! Data-parallel helpers.
//!
//! Hot loops (structure constants, identity checks, norm scans, multi-start
//! searches) go through [`map_range`] so they run on rayon when the
//! `parallel` feature is enabled and sequentially otherwise. Callers may
//! also force the sequential path with [`Exec::Sequential`]; results are
//! identical either way because every closure is pure and the output
//! order is the index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// `(0..n).map(f).collect()`, in parallel when enabled.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Maximum of `f(i)` over `0..n` (0.0 for an empty range).
pub fn max_range<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Parallel {
            return (0..n).into_par_iter().map(f).reduce(|| 0.0, f64::max);
        }
    }
    let _ = exec;
    (0..n).map(f).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let a = map_range(Exec::Sequential, 100, |i| (i * i) as f64);
        let b = map_range(Exec::Parallel, 100, |i| (i * i) as f64);
        assert_eq!(a, b);
        assert_eq!(max_range(Exec::Parallel, 10, |i| i as f64), 9.0);
        assert_eq!(max_range(Exec::Sequential, 0, |i| i as f64), 0.0);
    }
}
