use bispec_core::exec::Executor;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Thread count override; unset or `0` uses every core.
pub const THREADS_ENV: &str = "BISPEC_THREADS";

pub struct Rayon {
    pool: ThreadPool,
}

impl Rayon {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        Self { pool }
    }

    pub fn from_env() -> Self {
        let n = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0);
        Self::new(n)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Rayon {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}
