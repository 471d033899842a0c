//! Stable seed derivation.
//!
//! Per-trial and per-stream seeds come from folding coordinates through
//! splitmix64. The scheme is part of the public contract: regenerating a
//! dataset from its manifest must be bit-identical on any platform, so no
//! `std` hasher (whose output may change across releases) is used.

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Fold `parts` into `seed`, one splitmix64 round per part.
pub fn mix(seed: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &p in parts {
        s = splitmix64(s ^ p.wrapping_mul(0xA24BAED4963EE407));
    }
    s
}
