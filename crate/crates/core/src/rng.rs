//! Counter-based uniform variates.
//!
//! Every draw is a pure function of `(key, iteration, channel)`, so masks can
//! be regenerated in any order, on any thread, and always agree.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const ITERATION_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const CHANNEL_SALT: u64 = 0xAEF1_7502_108E_F2D9;

/// SplitMix64 finalizer; a bijection on u64 with good avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform(key: u64, iteration: u64, channel: u64) -> f64 {
    let mut h = mix64(key.wrapping_add(GOLDEN_GAMMA));
    h = mix64(h ^ iteration.wrapping_mul(ITERATION_SALT));
    h = mix64(
        h ^ channel
            .wrapping_mul(CHANNEL_SALT)
            .wrapping_add(GOLDEN_GAMMA),
    );
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derive an independent key for a sub-stream (fusion band, pulse index, ...).
#[inline]
pub fn derive_key(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(GOLDEN_GAMMA)))
}
