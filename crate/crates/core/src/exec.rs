//! Worker pool and the shared chunk cursor.
//!
//! With the `parallel` feature each worker runs on its own rayon thread;
//! without it (or with a single worker) workers run one after another on the
//! calling thread. Either way every worker drains the same cursor, so results
//! only differ in timing.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Hands out `[start, start + chunk)` ranges of `0..total` to whoever asks.
#[derive(Debug)]
pub struct ChunkCursor {
    next: AtomicUsize,
    total: usize,
    chunk: usize,
}

impl ChunkCursor {
    pub fn new(total: usize, chunk: usize) -> Self {
        Self {
            next: AtomicUsize::new(0),
            total,
            chunk: chunk.max(1),
        }
    }

    pub fn claim(&self) -> Option<Range<usize>> {
        let start = self.next.fetch_add(self.chunk, Ordering::Relaxed);
        (start < self.total).then(|| start..(start + self.chunk).min(self.total))
    }
}

/// Runs `work(worker_id)` for every id in `0..workers` and collects results in
/// id order.
pub fn run_workers<R, F>(workers: usize, work: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    if workers > 1 {
        return run_on_pool(workers, work);
    }
    Ok((0..workers).map(work).collect())
}

#[cfg(feature = "parallel")]
fn run_on_pool<R, F>(workers: usize, work: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut slots: Vec<Option<R>> = (0..workers).map(|_| None).collect();
    let work = &work;
    pool.scope(|s| {
        for (id, slot) in slots.iter_mut().enumerate() {
            s.spawn(move |_| *slot = Some(work(id)));
        }
    });
    Ok(slots
        .into_iter()
        .map(|r| r.expect("worker finished"))
        .collect())
}
