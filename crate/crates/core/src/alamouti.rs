//! Alamouti encoding and the interference-free receiver-1 decoder.
//!
//! Stacking antenna `m`'s two samples as `(r_1, r_2*)` turns the code into a
//! linear model `y_m = A_m s / sqrt(2) + n_m` with `A_m` the Alamouti matrix
//! over column `m` of the channel. Since `A_m^H A_m = g_m I`, matched
//! filtering each antenna and summing (MRC) leaves `(g_1 + g_2) s / sqrt(2)`
//! plus white noise, and each symbol can be sliced on its own.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::RxBlock;
use crate::cxmat::{alamouti_matrix, AlamoutiMat, Cx, Mat2, Vec2};
use crate::error::{Error, Result};
use crate::modem::{demap_ml, Constellation, SymbolIndex};

/// Gains below this are treated as a singular channel.
pub const DEGENERATE_GAIN: f64 = 1e-12;

/// One Alamouti block: rows are time slots, columns transmit antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Codeword(pub Mat2);

/// `[[s1, s2], [-s2*, s1*]] / sqrt(2)`.
pub fn encode(s1: Cx, s2: Cx) -> Codeword {
    Codeword(Mat2::new(s1, s2, -s2.conj(), s1.conj()).scale(FRAC_1_SQRT_2))
}

/// `(r_1, r_2) -> (r_1, r_2*)`.
#[inline]
pub fn stack_conjugate(samples: Vec2) -> Vec2 {
    [samples[0], samples[1].conj()]
}

/// Alamouti matrix over column `m` of a link matrix.
#[inline]
pub fn antenna_matrix(h: &Mat2, m: usize) -> AlamoutiMat {
    alamouti_matrix(h.get(0, m), h.get(1, m))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rx1Decision {
    pub s1_idx: SymbolIndex,
    pub s2_idx: SymbolIndex,
    /// Amplitude gain on each symbol after MRC, `(g_1 + g_2) / sqrt(2)`.
    pub combined_gain: f64,
}

/// MRC statistic `sum_m A_m^H (r_{1,m}, r_{2,m}*)` and the summed column gain.
pub fn mrc_statistic(rx: &RxBlock, h: &Mat2) -> (Vec2, f64) {
    let mut z = [Cx::new(0.0, 0.0); 2];
    let mut g = 0.0;
    for m in 0..2 {
        let a = antenna_matrix(h, m);
        let v = a.adjoint_mul(&stack_conjugate(rx.antenna(m)));
        z[0] += v[0];
        z[1] += v[1];
        g += a.gain();
    }
    (z, g)
}

pub fn rx1_decode(rx1: &RxBlock, h_11: &Mat2, c: &Constellation) -> Result<Rx1Decision> {
    let (z, g) = mrc_statistic(rx1, h_11);
    let combined_gain = g * FRAC_1_SQRT_2;
    if combined_gain < DEGENERATE_GAIN {
        return Err(Error::DegenerateChannel { gain: combined_gain });
    }
    Ok(Rx1Decision {
        s1_idx: demap_ml(z[0], combined_gain, c),
        s2_idx: demap_ml(z[1], combined_gain, c),
        combined_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channel, snr_to_sigma_sq, transmit_block, NoiseSpec};
    use crate::cxmat::{inner, ZERO};
    use crate::rng::{complex_gaussian, symbol_index, trial_rng};

    const I: Cx = Cx::new(0.0, 1.0);
    const ONE: Cx = Cx::new(1.0, 0.0);

    #[test]
    fn encode_examples() {
        let k = FRAC_1_SQRT_2;
        assert_eq!(encode(ONE, ONE).0, Mat2::new(ONE, ONE, -ONE, ONE).scale(k));
        assert_eq!(encode(ONE, I).0, Mat2::new(ONE, I, I, ONE).scale(k));
    }

    #[test]
    fn codeword_columns_orthogonal() {
        let mut rng = trial_rng(1, 0, 0);
        for _ in 0..1000 {
            let cw = encode(complex_gaussian(&mut rng), complex_gaussian(&mut rng));
            assert!(inner(&cw.0.col(0), &cw.0.col(1)).norm() < 1e-12);
            let row2 = cw.0.row(1);
            let row1 = cw.0.row(0);
            assert_eq!(row2, [-row1[1].conj(), row1[0].conj()]);
        }
    }

    #[test]
    fn unit_energy_per_channel_use() {
        let c = Constellation::qam16();
        let mut rng = trial_rng(2, 0, 0);
        let n = 50_000;
        let mut e = 0.0;
        for _ in 0..n {
            let s1 = c.point(symbol_index(&mut rng, 16));
            let s2 = c.point(symbol_index(&mut rng, 16));
            e += encode(s1, s2).0.frob_norm_sq() / 2.0;
        }
        assert!((e / n as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn stack_conjugate_examples() {
        assert_eq!(stack_conjugate([Cx::new(1.0, 1.0), Cx::new(1.0, -1.0)]), [Cx::new(1.0, 1.0), Cx::new(1.0, 1.0)]);
        let real = [Cx::new(2.0, 0.0), Cx::new(-3.0, 0.0)];
        assert_eq!(stack_conjugate(real), real);
        let v = [Cx::new(0.5, -2.0), Cx::new(1.5, 0.25)];
        assert_eq!(stack_conjugate(stack_conjugate(v)), v);
    }

    #[test]
    fn matched_filter_identity() {
        let mut rng = trial_rng(3, 0, 0);
        for _ in 0..1000 {
            let h = draw_channel(&mut rng).h_11;
            for m in 0..2 {
                let a = antenna_matrix(&h, m);
                let g = a.gain();
                let p = a.to_mat().adjoint() * a.to_mat();
                let want = Mat2::diag(Cx::new(g, 0.0), Cx::new(g, 0.0));
                assert!((p - want).frob_norm_sq().sqrt() < 1e-12 * g.max(1.0));
            }
        }
    }

    #[test]
    fn zero_noise_exact() {
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            for t in 0..10_000 {
                let mut rng = trial_rng(4, 0, t);
                let ch = draw_channel(&mut rng);
                let (i1, i2) = (symbol_index(&mut rng, c.len()), symbol_index(&mut rng, c.len()));
                let cw = encode(c.point(i1), c.point(i2));
                let (rx1, _) = transmit_block(&cw, None, &ch, &NoiseSpec::noiseless(), &mut rng);
                let d = rx1_decode(&rx1, &ch.h_11, &c).unwrap();
                assert_eq!((d.s1_idx, d.s2_idx), (i1, i2));
                let g = ch.h_11.frob_norm_sq();
                assert!((d.combined_gain - g * FRAC_1_SQRT_2).abs() < 1e-12 * g);
            }
        }
    }

    #[test]
    fn single_antenna_column() {
        let c = Constellation::qam16();
        let mut rng = trial_rng(5, 0, 0);
        for _ in 0..1000 {
            let mut ch = draw_channel(&mut rng);
            ch.h_11.0[0][1] = ZERO;
            ch.h_11.0[1][1] = ZERO;
            let (i1, i2) = (symbol_index(&mut rng, 16), symbol_index(&mut rng, 16));
            let (rx1, _) =
                transmit_block(&encode(c.point(i1), c.point(i2)), None, &ch, &NoiseSpec::noiseless(), &mut rng);
            let d = rx1_decode(&rx1, &ch.h_11, &c).unwrap();
            assert_eq!((d.s1_idx, d.s2_idx), (i1, i2));
        }
    }

    #[test]
    fn degenerate_channel() {
        let rx = RxBlock(Mat2::zero());
        assert!(matches!(rx1_decode(&rx, &Mat2::zero(), &Constellation::qpsk()), Err(Error::DegenerateChannel { .. })));
    }

    #[test]
    fn noisy_statistic_is_scaled_symbol_plus_noise() {
        // E[z | s, h] = (g1 + g2) s / sqrt(2)
        let c = Constellation::qpsk();
        let mut rng = trial_rng(6, 0, 0);
        let ch = draw_channel(&mut rng);
        let noise = snr_to_sigma_sq(0.0);
        let cw = encode(c.point(1), c.point(2));
        let n = 40_000;
        let mut acc = [Cx::new(0.0, 0.0); 2];
        for t in 0..n {
            let (rx1, _) = transmit_block(&cw, None, &ch, &noise, &mut trial_rng(6, 1, t));
            let (z, _) = mrc_statistic(&rx1, &ch.h_11);
            acc[0] += z[0];
            acc[1] += z[1];
        }
        let g = ch.h_11.frob_norm_sq();
        let tol = 4.0 * (g * noise.sigma_sq / n as f64).sqrt();
        assert!((acc[0] / n as f64 - c.point(1) * g * FRAC_1_SQRT_2).norm() < tol * 1.5);
        assert!((acc[1] / n as f64 - c.point(2) * g * FRAC_1_SQRT_2).norm() < tol * 1.5);
    }
}
