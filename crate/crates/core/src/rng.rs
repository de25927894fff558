//! Seeded, platform-independent random streams.
//!
//! Every consumer derives its own PCG64 stream from `(seed, domain, index)`
//! so that per-item generation does not depend on iteration order. Helpers
//! sample through fixed-width integers only; `usize`-based sampling in
//! `rand` differs between 32- and 64-bit targets.

use rand::{Rng as _, SeedableRng};
use rand_pcg::Pcg64;
use sha2::{Digest, Sha256};

pub type Rng = Pcg64;

pub fn substream(seed: u64, domain: &str, index: u64) -> Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain.as_bytes());
    h.update(index.to_le_bytes());
    Pcg64::from_seed(h.finalize().into())
}

/// Uniform integer in `lo..=hi`.
pub fn between(rng: &mut Rng, lo: u32, hi: u32) -> u32 {
    rng.gen_range(lo..=hi)
}

/// Uniform index in `0..n`.
pub fn index(rng: &mut Rng, n: usize) -> usize {
    assert!(n > 0, "index of empty range");
    rng.gen_range(0..n as u64) as usize
}

pub fn unit(rng: &mut Rng) -> f64 {
    rng.gen::<f64>()
}

pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

/// `k` distinct indices from `0..n`, in draw order.
pub fn sample_distinct(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot draw {k} distinct items from {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + index(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
