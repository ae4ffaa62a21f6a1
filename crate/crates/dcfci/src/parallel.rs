use dcfci_core::exec::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Executor backed by a dedicated rayon pool. Results come back in input
/// order whatever the thread count.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(RayonExecutor {
            pool: ThreadPoolBuilder::new().num_threads(threads).build()?,
        })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}
