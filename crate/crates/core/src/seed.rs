//! Seed derivation.
//!
//! Every replicate of a sweep runs with
//! `splitmix64(splitmix64(splitmix64(base) ^ point) ^ replicate)`, where
//! `point` and `replicate` are zero-based. Any single run can therefore be
//! repeated in isolation with `--seed <derived>`.

/// SplitMix64 finaliser (Steele, Lea, Flood 2014 constants).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, point: u64, replicate: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ point) ^ replicate)
}

/// Seed for the measurement stream of sample `index` within a run. Kept
/// apart from the churn stream so measuring never perturbs the trajectory.
pub fn sample_seed(run_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(run_seed ^ 0xA5A5_5A5A_F00D_CAFE) ^ index)
}

pub const DERIVATION_DOC: &str =
    "derived seed = splitmix64(splitmix64(splitmix64(seed) ^ point) ^ replicate)";
