//! Reference receivers and the TDMA comparison scheme.
//!
//! The joint-ML receivers search every symbol hypothesis against the raw
//! receive model `R = C1 H + C2 H' + N`. They share no code path with the
//! Alamouti/cancellation receivers and serve as their oracles.
//!
//! The TDMA baseline gives each user the whole channel for one slot in turn.
//! The active user sends a single 16-QAM stream on the dominant eigenmode of
//! its link (full-CSIT transmit beamforming), and the receiver applies the
//! matched filter `(H w)^H`. With 4 bits per use for half the time, each user
//! averages 2 bits per channel use, the same as QPSK Alamouti with both
//! users always on.

use rand_chacha::rand_core::RngCore;

use crate::alamouti::{encode, DEGENERATE_GAIN};
use crate::channel::{NoiseSpec, RxBlock, ZChannelRealization};
use crate::cxmat::{hermitian_eig2, inner, norm_sq, Mat2, Vec2};
use crate::error::{Error, Result};
use crate::modem::{demap_ml, Constellation, SymbolIndex};
use crate::rng::complex_gaussian;

pub type SymbolPair = (SymbolIndex, SymbolIndex);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointMlDecision {
    pub user1_pair: SymbolPair,
    pub user2_pair: SymbolPair,
    /// Residual energy of the winning hypothesis.
    pub metric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointMlRx1 {
    pub pair: SymbolPair,
    pub metric: f64,
}

/// Largest hypothesis space `joint_ml_rx2` will search.
pub const MAX_JOINT_HYPOTHESES: usize = 65_536;

fn codeword_products(c: &Constellation, h: &Mat2) -> Vec<Mat2> {
    let m = c.len();
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(encode(c.point(i), c.point(j)).0 * *h);
        }
    }
    out
}

/// Exhaustive ML over both users' symbol pairs at receiver 2. Ties resolve
/// to the lexicographically smallest `(u1s1, u1s2, u2s1, u2s2)`.
pub fn joint_ml_rx2(rx2: &RxBlock, h_12: &Mat2, h_22: &Mat2, c: &Constellation) -> JointMlDecision {
    let m = c.len();
    assert!(m.pow(4) <= MAX_JOINT_HYPOTHESES, "joint search over {} hypotheses", m.pow(4));
    let user1 = codeword_products(c, h_12);
    let user2 = codeword_products(c, h_22);
    let mut best = (0, 0, f64::INFINITY);
    for (k1, y1) in user1.iter().enumerate() {
        let partial = rx2.0 - *y1;
        for (k2, y2) in user2.iter().enumerate() {
            let metric = (partial - *y2).frob_norm_sq();
            if metric < best.2 {
                best = (k1, k2, metric);
            }
        }
    }
    JointMlDecision { user1_pair: (best.0 / m, best.0 % m), user2_pair: (best.1 / m, best.1 % m), metric: best.2 }
}

/// Exhaustive ML over user 1's symbol pair at receiver 1.
pub fn joint_ml_rx1(rx1: &RxBlock, h_11: &Mat2, c: &Constellation) -> JointMlRx1 {
    let m = c.len();
    let mut best = (0, f64::INFINITY);
    for (k, y) in codeword_products(c, h_11).iter().enumerate() {
        let metric = (rx1.0 - *y).frob_norm_sq();
        if metric < best.1 {
            best = (k, metric);
        }
    }
    JointMlRx1 { pair: (best.0 / m, best.0 % m), metric: best.1 }
}

/// Unit-norm transmit weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformerWeights {
    pub w: Vec2,
    /// `|h w|^2`, the largest eigenvalue of `h^H h`.
    pub gain: f64,
}

/// Dominant right singular vector of `h`, where `h` maps transmit antennas
/// (columns) to receive antennas (rows): the received vector is `h w s`.
pub fn eigen_beamform(h: &Mat2) -> Result<BeamformerWeights> {
    let eig = hermitian_eig2(&(h.adjoint() * *h))?;
    if eig.values[0] < DEGENERATE_GAIN {
        return Err(Error::DegenerateChannel { gain: eig.values[0] });
    }
    Ok(BeamformerWeights { w: eig.vectors[0], gain: eig.values[0] })
}

/// Symbols carried in one TDMA frame: each user gets one slot of two
/// channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdmaSymbols {
    pub user1: SymbolPair,
    pub user2: SymbolPair,
}

fn beamformed_slot<R: RngCore>(
    link: &Mat2,
    symbols: SymbolPair,
    c: &Constellation,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<SymbolPair> {
    // link entries are (tx, rx); the beamformer wants rx x tx
    let h = link.transpose();
    let bf = eigen_beamform(&h)?;
    let hw = h * bf.w;
    let sigma = noise.sigma();
    let mut decide = |idx: SymbolIndex| {
        let s = c.point(idx);
        let y = [hw[0] * s + complex_gaussian(rng) * sigma, hw[1] * s + complex_gaussian(rng) * sigma];
        demap_ml(inner(&hw, &y), norm_sq(&hw), c)
    };
    let d1 = decide(symbols.0);
    let d2 = decide(symbols.1);
    Ok((d1, d2))
}

/// One TDMA frame: user 1 on `h_11` in the first slot, user 2 on `h_22` in
/// the second. Noise is drawn per channel use, two receive antennas each.
pub fn tdma_trial<R: RngCore>(
    sent: &TdmaSymbols,
    ch: &ZChannelRealization,
    noise: &NoiseSpec,
    c: &Constellation,
    rng: &mut R,
) -> Result<TdmaSymbols> {
    let user1 = beamformed_slot(&ch.h_11, sent.user1, c, noise, rng)?;
    let user2 = beamformed_slot(&ch.h_22, sent.user2, c, noise, rng)?;
    Ok(TdmaSymbols { user1, user2 })
}

/// `rho * lambda_max(H^H H)` for a link stored as (tx, rx).
pub fn beamforming_snr(link: &Mat2, noise: &NoiseSpec) -> Result<f64> {
    Ok(eigen_beamform(&link.transpose())?.gain / noise.sigma_sq)
}
