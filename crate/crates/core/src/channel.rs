//! Quasi-static Rayleigh fading over the Z topology, AWGN, and the SNR
//! convention.
//!
//! Matrix entry `(i, k)` of each link is the gain from transmit antenna `i`
//! to receive antenna `k`, so a received block is `R = C * H + N` with the
//! codeword `C` indexed (time slot, transmit antenna) and `R` indexed
//! (time slot, receive antenna).
//!
//! Each user radiates unit total energy per channel use (unit-energy
//! constellation, codeword entries scaled by `1/sqrt(2)`), so
//! `rho = 1 / sigma_sq` is the per-user transmit-power-to-noise ratio at each
//! receive antenna.

use rand_chacha::rand_core::RngCore;

use crate::alamouti::Codeword;
use crate::cxmat::{Mat2, Vec2};
use crate::rng::complex_gaussian;

/// The three fading links of the Z channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZChannelRealization {
    /// user 1 -> receiver 1
    pub h_11: Mat2,
    /// user 1 -> receiver 2 (interference link)
    pub h_12: Mat2,
    /// user 2 -> receiver 2
    pub h_22: Mat2,
}

/// One received Alamouti block: rows are time slots, columns receive antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxBlock(pub Mat2);

impl RxBlock {
    /// The two time samples seen by receive antenna `m`.
    #[inline]
    pub fn antenna(&self, m: usize) -> Vec2 {
        self.0.col(m)
    }
}

/// Complex noise variance per receive antenna per channel use. Zero is the
/// noiseless limit (noise draws are still consumed from the stream).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_sq: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        NoiseSpec { sigma_sq: 0.0 }
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    /// Linear SNR `1 / sigma_sq`; infinite when noiseless.
    pub fn rho(&self) -> f64 {
        1.0 / self.sigma_sq
    }
}

/// `sigma_sq = 10^(-snr_db / 10)`; `+inf` dB maps to the noiseless limit.
pub fn snr_to_sigma_sq(snr_db: f64) -> NoiseSpec {
    NoiseSpec { sigma_sq: 10f64.powf(-snr_db / 10.0) }
}

fn draw_mat<R: RngCore>(rng: &mut R) -> Mat2 {
    let a = complex_gaussian(rng);
    let b = complex_gaussian(rng);
    let c = complex_gaussian(rng);
    let d = complex_gaussian(rng);
    Mat2::new(a, b, c, d)
}

/// Draws `h_11`, `h_12`, `h_22` in that order, entries row-major, all i.i.d.
/// CN(0, 1).
pub fn draw_channel<R: RngCore>(rng: &mut R) -> ZChannelRealization {
    let h_11 = draw_mat(rng);
    let h_12 = draw_mat(rng);
    let h_22 = draw_mat(rng);
    ZChannelRealization { h_11, h_12, h_22 }
}

/// A 2x2 block of i.i.d. CN(0, sigma_sq) samples, row-major.
pub fn draw_noise<R: RngCore>(noise: &NoiseSpec, rng: &mut R) -> Mat2 {
    draw_mat(rng).scale(noise.sigma())
}

/// Passes both users' codewords through the Z channel.
///
/// Noise for receiver 1 is drawn before receiver 2. Receiver 1 never sees
/// user 2; `cw2 = None` means user 2 is silent.
pub fn transmit_block<R: RngCore>(
    cw1: &Codeword,
    cw2: Option<&Codeword>,
    ch: &ZChannelRealization,
    noise: &NoiseSpec,
    rng: &mut R,
) -> (RxBlock, RxBlock) {
    let n1 = draw_noise(noise, rng);
    let n2 = draw_noise(noise, rng);
    let rx1 = cw1.0 * ch.h_11 + n1;
    let mut rx2 = cw1.0 * ch.h_12 + n2;
    if let Some(cw2) = cw2 {
        rx2 = rx2 + cw2.0 * ch.h_22;
    }
    (RxBlock(rx1), RxBlock(rx2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alamouti::encode;
    use crate::cxmat::{Cx, ZERO};
    use crate::rng::trial_rng;

    #[test]
    fn snr_convention() {
        assert_eq!(snr_to_sigma_sq(0.0).sigma_sq, 1.0);
        assert!((snr_to_sigma_sq(10.0).sigma_sq - 0.1).abs() < 1e-15);
        assert!((snr_to_sigma_sq(20.0).sigma_sq - 0.01).abs() < 1e-16);
        assert_eq!(snr_to_sigma_sq(f64::INFINITY).sigma_sq, 0.0);
    }

    #[test]
    fn fading_statistics() {
        let n = 100_000usize;
        let mut rng = trial_rng(11, 0, 0);
        let mut sum = [Cx::new(0.0, 0.0); 12];
        let mut pow = [0.0; 12];
        for _ in 0..n {
            let ch = draw_channel(&mut rng);
            for (k, z) in [ch.h_11, ch.h_12, ch.h_22].iter().flat_map(|m| m.0.iter().flatten()).enumerate() {
                sum[k] += z;
                pow[k] += z.norm_sqr();
            }
        }
        let nf = n as f64;
        for k in 0..12 {
            let m = sum[k] / nf;
            assert!(m.re.abs() < 4.0 / nf.sqrt() && m.im.abs() < 4.0 / nf.sqrt(), "mean {k}: {m}");
            assert!((pow[k] / nf - 1.0).abs() < 0.02, "power {k}: {}", pow[k] / nf);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        assert_eq!(draw_channel(&mut trial_rng(4, 1, 2)), draw_channel(&mut trial_rng(4, 1, 2)));
        assert_ne!(draw_channel(&mut trial_rng(4, 1, 2)), draw_channel(&mut trial_rng(4, 1, 3)));
    }

    #[test]
    fn noise_statistics() {
        let n = 100_000usize;
        let noise = snr_to_sigma_sq(3.0);
        let mut rng = trial_rng(12, 0, 0);
        let (mut sum, mut pow) = (Cx::new(0.0, 0.0), 0.0);
        for _ in 0..n / 4 {
            for z in draw_noise(&noise, &mut rng).0.iter().flatten() {
                sum += z;
                pow += z.norm_sqr();
            }
        }
        let nf = (n / 4 * 4) as f64;
        let s = noise.sigma_sq;
        let m = sum / nf;
        assert!(m.re.abs() < 4.0 * (s / 2.0 / nf).sqrt());
        assert!(m.im.abs() < 4.0 * (s / 2.0 / nf).sqrt());
        // |z|^2 ~ Exp(mean s), std s
        assert!((pow / nf - s).abs() < 4.0 * s / nf.sqrt());
    }

    #[test]
    fn noiseless_single_link() {
        let mut rng = trial_rng(2, 0, 0);
        let ch = draw_channel(&mut rng);
        let ch = ZChannelRealization { h_12: Mat2::zero(), ..ch };
        let s1 = Cx::new(0.3, -0.7);
        let s2 = Cx::new(-1.1, 0.2);
        let cw = encode(s1, s2);
        let (rx1, rx2) = transmit_block(&cw, None, &ch, &NoiseSpec::noiseless(), &mut rng);
        assert_eq!(rx2.0, Mat2::zero());
        // r_{t,m} per the receive model, written out term by term
        let k = std::f64::consts::FRAC_1_SQRT_2;
        for m in 0..2 {
            let (a1, a2) = (ch.h_11.get(0, m), ch.h_11.get(1, m));
            let r1 = (s1 * a1 + s2 * a2) * k;
            let r2 = (-s2.conj() * a1 + s1.conj() * a2) * k;
            assert!((rx1.0.get(0, m) - r1).norm() < 1e-15);
            assert!((rx1.0.get(1, m) - r2).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_channel_passes_rows() {
        let cw = encode(Cx::new(1.0, 2.0), Cx::new(-0.5, 0.25));
        let ch = ZChannelRealization { h_11: Mat2::identity(), h_12: Mat2::zero(), h_22: Mat2::zero() };
        let (rx1, _) = transmit_block(&cw, None, &ch, &NoiseSpec::noiseless(), &mut trial_rng(0, 0, 0));
        assert_eq!(rx1.0, cw.0);
    }

    #[test]
    fn rx2_matches_direct_sum() {
        let mut rng = trial_rng(21, 0, 0);
        for t in 0..200 {
            let ch = draw_channel(&mut rng);
            let (s, q) = (
                [complex_gaussian(&mut rng), complex_gaussian(&mut rng)],
                [complex_gaussian(&mut rng), complex_gaussian(&mut rng)],
            );
            let noise = snr_to_sigma_sq(5.0);
            let mut tx_rng = trial_rng(21, 1, t);
            let (_, rx2) = transmit_block(&encode(s[0], s[1]), Some(&encode(q[0], q[1])), &ch, &noise, &mut tx_rng);
            let mut nrng = trial_rng(21, 1, t);
            let _n1 = draw_noise(&noise, &mut nrng);
            let n2 = draw_noise(&noise, &mut nrng);
            let k = std::f64::consts::FRAC_1_SQRT_2;
            for m in 0..2 {
                let (a1, a2) = (ch.h_12.get(0, m), ch.h_12.get(1, m));
                let (b1, b2) = (ch.h_22.get(0, m), ch.h_22.get(1, m));
                let r1 = k * (s[0] * a1 + s[1] * a2) + k * (q[0] * b1 + q[1] * b2) + n2.get(0, m);
                let r2 = k * (-s[1].conj() * a1 + s[0].conj() * a2)
                    + k * (-q[1].conj() * b1 + q[0].conj() * b2)
                    + n2.get(1, m);
                assert!((rx2.0.get(0, m) - r1).norm() < 1e-12);
                assert!((rx2.0.get(1, m) - r2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn receiver1_ignores_user2() {
        let mut rng = trial_rng(30, 0, 0);
        let ch = draw_channel(&mut rng);
        let cw1 = encode(Cx::new(0.7, 0.7), Cx::new(-0.7, 0.7));
        let noise = snr_to_sigma_sq(10.0);
        let a = transmit_block(&cw1, Some(&encode(Cx::new(1.0, 0.0), ZERO)), &ch, &noise, &mut trial_rng(30, 0, 1));
        let b = transmit_block(
            &cw1,
            Some(&encode(Cx::new(-3.0, 2.0), Cx::new(0.0, 5.0))),
            &ch,
            &noise,
            &mut trial_rng(30, 0, 1),
        );
        let c = transmit_block(&cw1, None, &ch, &noise, &mut trial_rng(30, 0, 1));
        assert_eq!(a.0, b.0);
        assert_eq!(a.0, c.0);
        assert_ne!(a.1, b.1);
    }
}
