//! Pluggable execution of independent work items.
//!
//! Grid scans, Monte Carlo blocks and sampling sweeps hand their per-item
//! closures to an [`Executor`]. Results always come back in index order and
//! every reduction in this crate runs sequentially over that vector, so the
//! output does not depend on how the items were scheduled.

use alloc::vec::Vec;

pub trait Executor: Sync {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every item on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
