//! Rayon-backed replication with a fixed worker count.

use rayon::prelude::*;
use uoh_core::replicate::Replicator;

use crate::error::{Error, Result};

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Usage("--workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {workers} workers: {e}")))?;
        Ok(Pool { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Map over items in parallel, results in input order.
    pub fn map_items<T: Sync, U: Send>(&self, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

impl Replicator for Pool {
    fn map<T: Send, F: Fn(u64) -> T + Sync + Send>(&self, reps: u64, f: F) -> Vec<T> {
        self.pool.install(|| (0..reps).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let p = Pool::new(4).unwrap();
        let v = p.map(1000, |r| r * 3);
        assert!(v.iter().enumerate().all(|(i, x)| *x == 3 * i as u64));
        assert!(Pool::new(0).is_err());
    }
}
