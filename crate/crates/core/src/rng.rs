//! Per-trial random streams and Gaussian sampling.
//!
//! Every Monte Carlo trial owns a ChaCha8 stream addressed by
//! `(seed, snr_index, trial)`: the seed and SNR index are mixed into the
//! 256-bit key, the trial index selects the ChaCha stream. Results therefore
//! depend only on the trial's address, never on which worker ran it.
//!
//! Complex Gaussians use the paired polar transform: two uniforms `u1, u2`
//! give `sqrt(-ln u1) * exp(2 pi i u2)`, which is exactly CN(0, 1). Each
//! complex sample consumes exactly two `u64` draws, so stream consumption is
//! a fixed function of the simulated quantities.

use std::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cxmat::Cx;

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for trial `trial` of SNR point `snr_index` under `seed`.
pub fn trial_rng(seed: u64, snr_index: u64, trial: u64) -> TrialRng {
    let mut key = [0u8; 32];
    let words = [
        mix64(seed),
        mix64(seed ^ mix64(snr_index)),
        mix64(snr_index.wrapping_add(0x5851_f42d_4c95_7f2d)),
        mix64(seed.rotate_left(32) ^ snr_index),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Uniform on (0, 1], 53-bit resolution.
#[inline]
pub fn uniform_open0<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Circularly symmetric complex Gaussian with unit variance (each real
/// component has variance 1/2).
#[inline]
pub fn complex_gaussian<R: RngCore>(rng: &mut R) -> Cx {
    let u1 = uniform_open0(rng);
    let u2 = uniform_open0(rng);
    Cx::from_polar((-u1.ln()).sqrt(), TAU * u2)
}

/// Uniform symbol index in `0..m` for `m` a power of two.
#[inline]
pub fn symbol_index<R: RngCore>(rng: &mut R, m: usize) -> usize {
    debug_assert!(m.is_power_of_two());
    (rng.next_u64() >> 32) as usize & (m - 1)
}
