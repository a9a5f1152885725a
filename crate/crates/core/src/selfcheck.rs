//! Fast sanity checks run by `zchan selfcheck`.

use statrs::function::erf::erfc;

use crate::alamouti::{encode, rx1_decode};
use crate::baselines::joint_ml_rx1;
use crate::channel::{draw_channel, snr_to_sigma_sq, transmit_block};
use crate::cxmat::Cx;
use crate::harness::{run_point, scalar_channel_qpsk, sweep, write_csv, SchemeSel, SimConfig};
use crate::ic_rx::{eff_coefficients, h_hat_matrix};
use crate::modem::{Constellation, Modulation};
use crate::rng::{symbol_index, trial_rng};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

fn base_cfg() -> SimConfig {
    SimConfig {
        scheme: SchemeSel::Both,
        modulation: Modulation::Qpsk,
        snr_grid_db: vec![f64::INFINITY],
        min_bit_errors: 200,
        max_blocks: 2000,
        seed: 0x5e1f,
        workers: 1,
    }
}

fn zero_noise() -> CheckResult {
    match run_point(&base_cfg(), 0) {
        Ok(recs) => {
            let errs: u64 = recs.iter().map(|r| r.total_errors() + r.degenerate).sum();
            check("zero_noise", errs == 0, format!("{errs} errors or degenerate blocks over {} records", recs.len()))
        }
        Err(e) => check("zero_noise", false, e.to_string()),
    }
}

fn h_hat_structure() -> CheckResult {
    let mut worst = 0.0f64;
    for t in 0..10_000 {
        let ch = draw_channel(&mut trial_rng(0x4a7, 0, t));
        let m = h_hat_matrix(&ch.h_12, &ch.h_22);
        let g = [
            ch.h_12.0[0][0].norm_sqr() + ch.h_12.0[1][0].norm_sqr(),
            ch.h_12.0[0][1].norm_sqr() + ch.h_12.0[1][1].norm_sqr(),
        ];
        let (a, b) = eff_coefficients(&ch.h_12, &ch.h_22, g);
        let scale = m.frob_norm_sq().sqrt();
        let dev = [
            (m.get(1, 0) + m.get(0, 1).conj()).norm(),
            (m.get(1, 1) - m.get(0, 0).conj()).norm(),
            (m.get(0, 0) - a).norm(),
            (m.get(0, 1) - b).norm(),
            (m.get(0, 0).conj() * m.get(0, 1) + m.get(1, 0).conj() * m.get(1, 1)).norm() / scale,
        ];
        worst = dev.iter().fold(worst, |w, d| w.max(d / scale));
    }
    check("h_hat_structure", worst <= 1e-10, format!("worst relative deviation {worst:.2e}"))
}

fn rx1_ml_equivalence() -> CheckResult {
    let c = Constellation::qpsk();
    let noise = snr_to_sigma_sq(10.0);
    let mut mismatches = 0;
    for t in 0..2000 {
        let mut rng = trial_rng(0x3d1, 0, t);
        let ch = draw_channel(&mut rng);
        let (i1, i2) = (symbol_index(&mut rng, 4), symbol_index(&mut rng, 4));
        let (rx1, _) = transmit_block(&encode(c.point(i1), c.point(i2)), None, &ch, &noise, &mut rng);
        let Ok(d) = rx1_decode(&rx1, &ch.h_11, &c) else { continue };
        if (d.s1_idx, d.s2_idx) != joint_ml_rx1(&rx1, &ch.h_11, &c).pair {
            mismatches += 1;
        }
    }
    check("rx1_ml_equivalence", mismatches == 0, format!("{mismatches} mismatches in 2000 trials"))
}

fn scalar_q_function() -> CheckResult {
    let ebn0_db = 4.0;
    let n = 200_000u64;
    let (bits, errors) = scalar_channel_qpsk(Cx::new(0.6, -0.8), ebn0_db, n, 0x9f);
    let p = 0.5 * erfc(10f64.powf(ebn0_db / 10.0).sqrt());
    let sd = (p * (1.0 - p) / bits as f64).sqrt();
    let ber = errors as f64 / bits as f64;
    check(
        "scalar_q_function",
        (ber - p).abs() <= 4.0 * sd,
        format!("ber {ber:.4e} vs Q {p:.4e} (4 sd = {:.1e})", 4.0 * sd),
    )
}

fn determinism() -> CheckResult {
    let cfg = SimConfig { snr_grid_db: vec![4.0, 8.0], max_blocks: 3000, min_bit_errors: 100, ..base_cfg() };
    let csv = |workers: usize| -> crate::error::Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_csv(&sweep(&SimConfig { workers, ..cfg.clone() })?, &mut buf)?;
        Ok(buf)
    };
    match (csv(1), csv(4)) {
        (Ok(a), Ok(b)) => check("determinism", a == b, format!("{} bytes, workers 1 vs 4", a.len())),
        (Err(e), _) | (_, Err(e)) => check("determinism", false, e.to_string()),
    }
}

pub fn run_all() -> Vec<CheckResult> {
    vec![zero_noise(), h_hat_structure(), rx1_ml_equivalence(), scalar_q_function(), determinism()]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for r in super::run_all() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
