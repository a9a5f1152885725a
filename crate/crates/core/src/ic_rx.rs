//! Receiver-2 interference cancellation.
//!
//! User 1's Alamouti block reaches both antennas of receiver 2 through the
//! interference link `h_12`. At antenna `m` the stacked observation is
//!
//! ```text
//! y_m = P_m s(1) / sqrt(2) + Q_m s(2) / sqrt(2) + n_m
//! ```
//!
//! with `P_m`, `Q_m` the Alamouti matrices over column `m` of `h_12` and
//! `h_22`. Multiplying by `P_m^H / g_m` (where `g_m = ||column m of h_12||^2`)
//! reduces user 1's contribution to the same `s(1) / sqrt(2)` on both
//! antennas, so `y_hat = v_2 - v_1` is free of user 1:
//!
//! ```text
//! y_hat = H_hat s(2) / sqrt(2) + n'',   H_hat = P_2^H Q_2 / g_2 - P_1^H Q_1 / g_1
//! ```
//!
//! A product `P^H Q` of two Alamouti matrices has the form
//! `[[a, b], [-b*, a*]]`, and so does the difference, so `H_hat` has
//! orthogonal columns of equal norm and user 2's symbols are sliced one at a
//! time. The noise `n''` is white with variance `sigma_sq (1/g_1 + 1/g_2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::alamouti::{antenna_matrix, stack_conjugate, DEGENERATE_GAIN};
use crate::channel::{NoiseSpec, RxBlock};
use crate::cxmat::{Cx, Mat2, Vec2};
use crate::error::{Error, Result};
use crate::modem::{demap_ml, Constellation, SymbolIndex};

/// Per-antenna observations after zero-forcing user 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroForced {
    /// `v[m] = P_m^H (r_{1,m}, r_{2,m}*) / g_m`
    pub v: [Vec2; 2],
    /// Squared column norms of `h_12`.
    pub g: [f64; 2],
}

/// Post-cancellation quantities feeding detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffChannel {
    pub a: Cx,
    pub b: Cx,
    pub g1: f64,
    pub g2: f64,
    /// Variance of each component of the residual noise on `y_hat`.
    pub noise_scale: f64,
}

impl EffChannel {
    /// `|a|^2 + |b|^2`
    #[inline]
    pub fn gain_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Materialized `[[a, b], [-b*, a*]]`.
    pub fn h_hat(&self) -> Mat2 {
        Mat2::new(self.a, self.b, -self.b.conj(), self.a.conj())
    }

    /// Per-symbol SNR after the noise-preserving normalization
    /// `(a, -b*)^H y_hat / sqrt(|a|^2 + |b|^2)`.
    pub fn post_detection_snr(&self) -> f64 {
        self.gain_sq() / (2.0 * self.noise_scale)
    }
}

/// `y_hat`, the user-1-free observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedObservation {
    pub y_hat: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rx2Decision {
    pub s1_idx: SymbolIndex,
    pub s2_idx: SymbolIndex,
    /// `sqrt(|a|^2 + |b|^2)`
    pub eff_gain: f64,
}

pub fn zero_force_user1(rx2: &RxBlock, h_12: &Mat2) -> Result<ZeroForced> {
    let mut out = ZeroForced { v: [[Cx::new(0.0, 0.0); 2]; 2], g: [0.0; 2] };
    for m in 0..2 {
        let p = antenna_matrix(h_12, m);
        let g = p.gain();
        if g < DEGENERATE_GAIN {
            return Err(Error::DegenerateChannel { gain: g });
        }
        let v = p.adjoint_mul(&stack_conjugate(rx2.antenna(m)));
        out.v[m] = [v[0] / g, v[1] / g];
        out.g[m] = g;
    }
    Ok(out)
}

/// Closed-form `(a, b)` from the two links and the column gains of `h_12`.
pub fn eff_coefficients(h_12: &Mat2, h_22: &Mat2, g: [f64; 2]) -> (Cx, Cx) {
    let term = |m: usize| {
        let (p1, p2) = (h_12.get(0, m), h_12.get(1, m));
        let (q1, q2) = (h_22.get(0, m), h_22.get(1, m));
        let a = p1.conj() * q1 + p2 * q2.conj();
        let b = p1.conj() * q2 - p2 * q1.conj();
        (a / g[m], b / g[m])
    };
    let (a1, b1) = term(0);
    let (a2, b2) = term(1);
    (a2 - a1, b2 - b1)
}

/// `H_hat` evaluated as the matrix expression
/// `P_2^H Q_2 / g_2 - P_1^H Q_1 / g_1`.
pub fn h_hat_matrix(h_12: &Mat2, h_22: &Mat2) -> Mat2 {
    let part = |m: usize| {
        let p = antenna_matrix(h_12, m);
        let q = antenna_matrix(h_22, m);
        (p.to_mat().adjoint() * q.to_mat()).scale(1.0 / p.gain())
    };
    part(1) - part(0)
}

pub fn cancel_and_extract(
    zf: &ZeroForced,
    h_12: &Mat2,
    h_22: &Mat2,
    noise: &NoiseSpec,
) -> Result<(CombinedObservation, EffChannel)> {
    let [v1, v2] = zf.v;
    let y_hat = [v2[0] - v1[0], v2[1] - v1[1]];
    let (a, b) = eff_coefficients(h_12, h_22, zf.g);
    let eff =
        EffChannel { a, b, g1: zf.g[0], g2: zf.g[1], noise_scale: noise.sigma_sq * (1.0 / zf.g[0] + 1.0 / zf.g[1]) };
    debug_assert!({
        let direct = h_hat_matrix(h_12, h_22);
        let scale = direct.frob_norm_sq().sqrt().max(1.0);
        (direct - eff.h_hat()).frob_norm_sq().sqrt() <= 1e-10 * scale
    });
    if eff.gain_sq() < DEGENERATE_GAIN {
        return Err(Error::DegenerateEffChannel { gain: eff.gain_sq() });
    }
    Ok((CombinedObservation { y_hat }, eff))
}

/// Matched filters on the two orthogonal columns of `H_hat`, sliced one
/// symbol at a time.
pub fn detect_user2(obs: &CombinedObservation, eff: &EffChannel, c: &Constellation) -> Rx2Decision {
    let [y0, y1] = obs.y_hat;
    let (a, b) = (eff.a, eff.b);
    // column 1 = (a, -b*), column 2 = (b, a*)
    let z1 = a.conj() * y0 - b * y1;
    let z2 = b.conj() * y0 + a * y1;
    let gain_sq = eff.gain_sq();
    let scale = gain_sq * FRAC_1_SQRT_2;
    Rx2Decision { s1_idx: demap_ml(z1, scale, c), s2_idx: demap_ml(z2, scale, c), eff_gain: gain_sq.sqrt() }
}

pub fn rx2_decode(
    rx2: &RxBlock,
    h_12: &Mat2,
    h_22: &Mat2,
    noise: &NoiseSpec,
    c: &Constellation,
) -> Result<Rx2Decision> {
    let zf = zero_force_user1(rx2, h_12)?;
    let (obs, eff) = cancel_and_extract(&zf, h_12, h_22, noise)?;
    Ok(detect_user2(&obs, &eff, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alamouti::encode;
    use crate::channel::{draw_channel, snr_to_sigma_sq, transmit_block};
    use crate::cxmat::{inner, ZERO};
    use crate::rng::{complex_gaussian, symbol_index, trial_rng};

    fn noiseless() -> NoiseSpec {
        NoiseSpec::noiseless()
    }

    #[test]
    fn pure_user1_is_recovered_on_both_antennas() {
        let c = Constellation::qam16();
        let mut rng = trial_rng(1, 0, 0);
        for _ in 0..1000 {
            let ch = draw_channel(&mut rng);
            let (s1, s2) = (c.point(symbol_index(&mut rng, 16)), c.point(symbol_index(&mut rng, 16)));
            let (_, rx2) = transmit_block(&encode(s1, s2), None, &ch, &noiseless(), &mut rng);
            let zf = zero_force_user1(&rx2, &ch.h_12).unwrap();
            let want = [s1 * FRAC_1_SQRT_2, s2 * FRAC_1_SQRT_2];
            for v in zf.v {
                assert!((v[0] - want[0]).norm() < 1e-12 && (v[1] - want[1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_forced_matches_direct_evaluation() {
        let mut rng = trial_rng(2, 0, 0);
        let k = FRAC_1_SQRT_2;
        for _ in 0..1000 {
            let ch = draw_channel(&mut rng);
            let s: Vec<Cx> = (0..4).map(|_| complex_gaussian(&mut rng)).collect();
            let (_, rx2) = transmit_block(&encode(s[0], s[1]), Some(&encode(s[2], s[3])), &ch, &noiseless(), &mut rng);
            let zf = zero_force_user1(&rx2, &ch.h_12).unwrap();
            for m in 0..2 {
                // s(1) + (1/g) [[p1*, p2], [p2*, -p1]] [[q1, q2], [q2*, -q1*]] s(2), all over sqrt(2)
                let (p1, p2) = (ch.h_12.get(0, m), ch.h_12.get(1, m));
                let (q1, q2) = (ch.h_22.get(0, m), ch.h_22.get(1, m));
                let g = p1.norm_sqr() + p2.norm_sqr();
                let m00 = p1.conj() * q1 + p2 * q2.conj();
                let m01 = p1.conj() * q2 - p2 * q1.conj();
                let m10 = p2.conj() * q1 - p1 * q2.conj();
                let m11 = p2.conj() * q2 + p1 * q1.conj();
                let e0 = k * (s[0] + (m00 * s[2] + m01 * s[3]) / g);
                let e1 = k * (s[1] + (m10 * s[2] + m11 * s[3]) / g);
                assert!((zf.v[m][0] - e0).norm() < 1e-10 * (1.0 + e0.norm()));
                assert!((zf.v[m][1] - e1).norm() < 1e-10 * (1.0 + e1.norm()));
                assert!((zf.g[m] - g).abs() < 1e-12 * g);
            }
        }
    }

    #[test]
    fn identical_antennas_degenerate() {
        let mut rng = trial_rng(3, 0, 0);
        let mut ch = draw_channel(&mut rng);
        for h in [&mut ch.h_12, &mut ch.h_22] {
            h.0[0][1] = h.0[0][0];
            h.0[1][1] = h.0[1][0];
        }
        let (_, rx2) = transmit_block(
            &encode(Cx::new(1.0, 0.0), ZERO),
            Some(&encode(ZERO, Cx::new(1.0, 0.0))),
            &ch,
            &noiseless(),
            &mut rng,
        );
        let zf = zero_force_user1(&rx2, &ch.h_12).unwrap();
        let (a, b) = eff_coefficients(&ch.h_12, &ch.h_22, zf.g);
        assert_eq!((a, b), (ZERO, ZERO));
        assert!(matches!(
            cancel_and_extract(&zf, &ch.h_12, &ch.h_22, &noiseless()),
            Err(Error::DegenerateEffChannel { .. })
        ));
    }

    #[test]
    fn silent_user2_link_has_zero_eff_channel() {
        let ch = draw_channel(&mut trial_rng(4, 0, 0));
        let zf = zero_force_user1(&RxBlock(Mat2::zero()), &ch.h_12).unwrap();
        assert_eq!(eff_coefficients(&ch.h_12, &Mat2::zero(), zf.g), (ZERO, ZERO));
    }

    #[test]
    fn zero_column_is_degenerate() {
        let mut ch = draw_channel(&mut trial_rng(5, 0, 0));
        ch.h_12.0[0][1] = ZERO;
        ch.h_12.0[1][1] = ZERO;
        let r = rx2_decode(&RxBlock(Mat2::zero()), &ch.h_12, &ch.h_22, &noiseless(), &Constellation::qpsk());
        assert!(matches!(r, Err(Error::DegenerateChannel { .. })));
    }

    #[test]
    fn closed_forms_match_matrix_expression() {
        let mut rng = trial_rng(6, 0, 0);
        for _ in 0..10_000 {
            let ch = draw_channel(&mut rng);
            let g = [antenna_matrix(&ch.h_12, 0).gain(), antenna_matrix(&ch.h_12, 1).gain()];
            let (a, b) = eff_coefficients(&ch.h_12, &ch.h_22, g);
            let direct = h_hat_matrix(&ch.h_12, &ch.h_22);
            let scale = direct.frob_norm_sq().sqrt();
            assert!((direct.get(0, 0) - a).norm() <= 1e-10 * scale);
            assert!((direct.get(0, 1) - b).norm() <= 1e-10 * scale);
            // structure and orthogonality
            assert!((direct.get(1, 0) + direct.get(0, 1).conj()).norm() <= 1e-10 * scale);
            assert!((direct.get(1, 1) - direct.get(0, 0).conj()).norm() <= 1e-10 * scale);
            assert!(inner(&direct.col(0), &direct.col(1)).norm() <= 1e-10 * scale * scale);
        }
    }

    #[test]
    fn zero_noise_end_to_end() {
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            for t in 0..10_000 {
                let mut rng = trial_rng(7, 0, t);
                let ch = draw_channel(&mut rng);
                let m = c.len();
                let idx: Vec<usize> = (0..4).map(|_| symbol_index(&mut rng, m)).collect();
                let cw1 = encode(c.point(idx[0]), c.point(idx[1]));
                let cw2 = encode(c.point(idx[2]), c.point(idx[3]));
                let (_, rx2) = transmit_block(&cw1, Some(&cw2), &ch, &noiseless(), &mut rng);
                let d = rx2_decode(&rx2, &ch.h_12, &ch.h_22, &noiseless(), &c).unwrap();
                assert_eq!((d.s1_idx, d.s2_idx), (idx[2], idx[3]));
            }
        }
    }

    #[test]
    fn exact_recovery_of_every_pair() {
        let c = Constellation::qpsk();
        let ch = draw_channel(&mut trial_rng(8, 0, 0));
        let g = [antenna_matrix(&ch.h_12, 0).gain(), antenna_matrix(&ch.h_12, 1).gain()];
        let (a, b) = eff_coefficients(&ch.h_12, &ch.h_22, g);
        let eff = EffChannel { a, b, g1: g[0], g2: g[1], noise_scale: 0.0 };
        for i in 0..4 {
            for j in 0..4 {
                let s = [c.point(i) * FRAC_1_SQRT_2, c.point(j) * FRAC_1_SQRT_2];
                let obs = CombinedObservation { y_hat: eff.h_hat() * s };
                let d = detect_user2(&obs, &eff, &c);
                assert_eq!((d.s1_idx, d.s2_idx), (i, j));
            }
        }
    }

    #[test]
    fn user1_symbols_do_not_leak() {
        let c = Constellation::qam16();
        let mut rng = trial_rng(9, 0, 0);
        let noise = snr_to_sigma_sq(15.0);
        for t in 0..500 {
            let ch = draw_channel(&mut rng);
            let cw2 = encode(c.point(3), c.point(12));
            let mut ys = Vec::new();
            for (i, j) in [(0, 0), (5, 9), (15, 2)] {
                let (_, rx2) =
                    transmit_block(&encode(c.point(i), c.point(j)), Some(&cw2), &ch, &noise, &mut trial_rng(9, 1, t));
                let zf = zero_force_user1(&rx2, &ch.h_12).unwrap();
                ys.push(cancel_and_extract(&zf, &ch.h_12, &ch.h_22, &noise).unwrap().0.y_hat);
            }
            for y in &ys[1..] {
                let scale = 1.0 + ys[0][0].norm() + ys[0][1].norm();
                assert!((y[0] - ys[0][0]).norm() < 1e-12 * scale * (1.0 / ch.h_12.frob_norm_sq()).max(1.0));
                assert!((y[1] - ys[0][1]).norm() < 1e-12 * scale * (1.0 / ch.h_12.frob_norm_sq()).max(1.0));
            }
        }
    }

    #[test]
    fn noise_scale_bookkeeping() {
        let ch = draw_channel(&mut trial_rng(10, 0, 0));
        let noise = snr_to_sigma_sq(7.0);
        let zf = zero_force_user1(&RxBlock(Mat2::zero()), &ch.h_12).unwrap();
        let (_, eff) = cancel_and_extract(&zf, &ch.h_12, &ch.h_22, &noise).unwrap();
        let want = noise.sigma_sq * (1.0 / zf.g[0] + 1.0 / zf.g[1]);
        assert!((eff.noise_scale - want).abs() < 1e-15 * want.max(1.0));
        assert!((eff.post_detection_snr() - eff.gain_sq() / (2.0 * want)).abs() < 1e-12 * eff.post_detection_snr());
    }
}
