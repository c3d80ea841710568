//! Deterministic per-task seeds derived from one master seed.
//!
//! `derive_seed(master, t, r)` mixes the master seed with the temperature index
//! and repetition index through SplitMix64, so any single (t, r) task can be
//! re-run on its own and get the same stream.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output step.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, t_index: usize, repetition: usize) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ (t_index as u64).wrapping_mul(GOLDEN));
    splitmix64(b ^ (repetition as u64).wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}
