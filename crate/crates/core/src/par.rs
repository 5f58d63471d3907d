//! Execution strategy for the data-parallel loops (page generation, crop
//! extraction, per-page matching).
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on a rayon
//! pool; without it every strategy runs sequentially. Results are always
//! returned in index order, so outputs do not depend on the strategy.

/// How index-parallel work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// `workers == 0` means the rayon default (one per core).
    Parallel { workers: usize },
    #[default]
    Auto,
}

impl Exec {
    pub fn from_workers(workers: usize) -> Self {
        match workers {
            1 => Exec::Sequential,
            n => Exec::Parallel { workers: n },
        }
    }

    /// Maps `f` over `0..n`, collecting in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self.resolve() {
            Resolved::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Resolved::Parallel(workers) => run_parallel(n, workers, f),
        }
    }

    /// Like [`Exec::map`]; on failure returns the error of the lowest failing
    /// index.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self.resolve() {
            Resolved::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Resolved::Parallel(workers) => {
                let results = run_parallel(n, workers, f);
                results.into_iter().collect()
            }
        }
    }

    fn resolve(self) -> Resolved {
        match self {
            Exec::Sequential => Resolved::Sequential,
            #[cfg(feature = "parallel")]
            Exec::Parallel { workers } => Resolved::Parallel(workers),
            #[cfg(feature = "parallel")]
            Exec::Auto => Resolved::Parallel(0),
            #[cfg(not(feature = "parallel"))]
            Exec::Parallel { .. } | Exec::Auto => Resolved::Sequential,
        }
    }
}

enum Resolved {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel(usize),
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if workers == 0 {
        return (0..n).into_par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("could not build a {workers}-thread pool ({e}); using the global pool");
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let f = |i: usize| i * i + 1;
        let seq = Exec::Sequential.map(1000, f);
        assert_eq!(seq, Exec::Parallel { workers: 4 }.map(1000, f));
        assert_eq!(seq, Exec::Auto.map(1000, f));
        assert_eq!(seq[10], 101);
    }

    #[test]
    fn try_map_propagates_errors() {
        let r: Result<Vec<usize>, String> =
            Exec::Parallel { workers: 2 }.try_map(50, |i| if i == 17 { Err(format!("bad {i}")) } else { Ok(i) });
        assert_eq!(r, Err("bad 17".to_string()));
    }
}
