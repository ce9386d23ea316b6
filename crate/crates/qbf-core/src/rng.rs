//! Deterministic seed derivation.
//!
//! Every stochastic routine takes an explicit generator. Independent units of
//! work (sweep points, Monte Carlo trials) each get their own generator
//! derived from the master seed and their indices, so results do not depend
//! on scheduling or worker-thread count.
//!
//! Derivation scheme: fold the master seed and each tag through splitmix64,
//! then seed a ChaCha8 stream from the result. Labels are folded bytewise via
//! FNV-1a before mixing.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One splitmix64 step: mixes `tag` into `state` and returns the new state.
pub fn mix(state: u64, tag: u64) -> u64 {
    let mut z = state
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(tag.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of a label, for mixing strings into the seed chain.
pub fn label_tag(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a generator from a master seed and a chain of tags.
pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut s = mix(master, 0x51_75_6f_69_6e); // "Quoin"
    for &t in tags {
        s = mix(s, t);
    }
    ChaCha8Rng::seed_from_u64(s)
}
