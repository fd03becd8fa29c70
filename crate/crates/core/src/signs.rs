//! Per-index random signs for the Littlewood–Offord style perturbations.
//!
//! Each sign is a pure function of `(seed, n)`, a splitmix64 finalizer applied
//! to `seed + n * golden_gamma`, so no generator state is shared.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The mixed 64-bit word for index `n`.
#[inline]
pub fn mix(seed: u64, n: u64) -> u64 {
    let mut z = seed.wrapping_add(n.wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `+1` when the top bit of the mixed word is clear, `-1` otherwise.
#[inline]
pub fn sign(seed: u64, n: u64) -> i8 {
    if mix(seed, n) >> 63 == 0 {
        1
    } else {
        -1
    }
}
