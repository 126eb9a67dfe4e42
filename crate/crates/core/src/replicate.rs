//! Deterministic replication seeding.
//!
//! Every Monte Carlo replication draws from its own ChaCha stream, keyed by
//! the run seed and a domain tag and selected by the replication index, so
//! results never depend on how replications are scheduled.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs `reps` independent replications and returns their results in
/// replication order.
pub trait Replicator: Sync {
    fn map<T, F>(&self, reps: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Single-threaded replicator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Replicator for Sequential {
    fn map<T, F>(&self, reps: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..reps).map(f).collect()
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// FNV-1a, used to turn labels into domain tags.
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// RNG for replication `rep` of the experiment identified by `(seed, domain)`.
pub fn replication_rng(seed: u64, domain: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ splitmix64(domain));
    rng.set_stream(rep);
    rng
}
