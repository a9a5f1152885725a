//! Monte Carlo engine: SNR sweeps, BER accounting, diversity estimation and
//! CSV output.
//!
//! Trials are grouped in fixed batches of [`BATCH_TRIALS`]. Workers run whole
//! batches; the merge walks batches in index order and applies the stopping
//! rule at batch boundaries, dropping any batch computed past the stopping
//! point. Since every trial draws from its own `(seed, snr_index, trial)`
//! stream, a point's result is a function of the config alone, whatever the
//! worker count.

mod config;
mod diversity;
mod report;

pub use config::{
    parse_config_text, parse_snr_grid, read_config_file, snr_range, Scheme, SchemeSel, SimConfig, DEFAULT_MAX_BLOCKS,
    DEFAULT_MIN_BIT_ERRORS, DEFAULT_SEED, PUBLISHABLE_MIN_ERRORS,
};
pub use diversity::{estimate_diversity, DiversityEstimate, DEFAULT_DIVERSITY_WINDOW_DB};
pub use report::{
    emit_csv, emit_diversity_csv, meta_path, metadata_lines, read_csv, write_csv, write_diversity_csv, write_metadata,
    CSV_HEADER, DIVERSITY_CSV_HEADER,
};

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;

use crate::alamouti::{encode, rx1_decode};
use crate::baselines::{joint_ml_rx1, joint_ml_rx2, tdma_trial, TdmaSymbols};
use crate::channel::{draw_channel, snr_to_sigma_sq, transmit_block, NoiseSpec};
use crate::cxmat::Cx;
use crate::error::{Error, Result};
use crate::ic_rx::rx2_decode;
use crate::modem::{demap_ml, Constellation};
use crate::rng::{complex_gaussian, symbol_index, trial_rng};

pub const BATCH_TRIALS: u64 = 1024;

/// One of the four symbol streams: two Alamouti symbols per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stream {
    User1S1,
    User1S2,
    User2S1,
    User2S2,
}

impl Stream {
    pub const ALL: [Stream; 4] = [Stream::User1S1, Stream::User1S2, Stream::User2S1, Stream::User2S2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Stream::User1S1 => "user1_s1",
            Stream::User1S2 => "user1_s2",
            Stream::User2S1 => "user2_s1",
            Stream::User2S2 => "user2_s2",
        }
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stream::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown stream '{s}'")))
    }
}

/// Error statistics of one scheme at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub scheme: Scheme,
    /// Bits counted per stream, indexed by [`Stream::index`].
    pub bits: [u64; 4],
    pub bit_errors: [u64; 4],
    /// Non-degenerate blocks that contributed bits.
    pub blocks: u64,
    /// Blocks skipped because a receiver hit a singular channel.
    pub degenerate: u64,
}

impl BerRecord {
    pub fn ber(&self, s: Stream) -> f64 {
        let i = s.index();
        if self.bits[i] == 0 {
            0.0
        } else {
            self.bit_errors[i] as f64 / self.bits[i] as f64
        }
    }

    /// Mean of the two users' BERs, each over its two streams.
    pub fn user_average_ber(&self) -> f64 {
        let user = |a: usize, b: usize| {
            let bits = self.bits[a] + self.bits[b];
            if bits == 0 {
                0.0
            } else {
                (self.bit_errors[a] + self.bit_errors[b]) as f64 / bits as f64
            }
        };
        0.5 * (user(0, 1) + user(2, 3))
    }

    pub fn total_errors(&self) -> u64 {
        self.bit_errors.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    errors: [u64; 4],
    blocks: u64,
    degenerate: u64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        for (a, b) in self.errors.iter_mut().zip(o.errors) {
            *a += b;
        }
        self.blocks += o.blocks;
        self.degenerate += o.degenerate;
    }

    fn attempted(&self) -> u64 {
        self.blocks + self.degenerate
    }
}

/// Bit errors per stream for one trial, `None` when a receiver reports a
/// degenerate channel.
pub fn run_trial<R: RngCore>(scheme: Scheme, c: &Constellation, noise: &NoiseSpec, rng: &mut R) -> Option<[u32; 4]> {
    // draw order: channels, user-1 symbols, user-2 symbols, noise
    let ch = draw_channel(rng);
    let m = c.len();
    let sent = [symbol_index(rng, m), symbol_index(rng, m), symbol_index(rng, m), symbol_index(rng, m)];
    let decided = match scheme {
        Scheme::Ic | Scheme::Oracle => {
            let cw1 = encode(c.point(sent[0]), c.point(sent[1]));
            let cw2 = encode(c.point(sent[2]), c.point(sent[3]));
            let (rx1, rx2) = transmit_block(&cw1, Some(&cw2), &ch, noise, rng);
            if scheme == Scheme::Ic {
                let d1 = rx1_decode(&rx1, &ch.h_11, c).ok()?;
                let d2 = rx2_decode(&rx2, &ch.h_12, &ch.h_22, noise, c).ok()?;
                [d1.s1_idx, d1.s2_idx, d2.s1_idx, d2.s2_idx]
            } else {
                let u1 = joint_ml_rx1(&rx1, &ch.h_11, c).pair;
                let u2 = joint_ml_rx2(&rx2, &ch.h_12, &ch.h_22, c).user2_pair;
                [u1.0, u1.1, u2.0, u2.1]
            }
        }
        Scheme::Tdma => {
            let tx = TdmaSymbols { user1: (sent[0], sent[1]), user2: (sent[2], sent[3]) };
            let d = tdma_trial(&tx, &ch, noise, c, rng).ok()?;
            [d.user1.0, d.user1.1, d.user2.0, d.user2.1]
        }
    };
    Some(std::array::from_fn(|k| c.bit_errors(sent[k], decided[k])))
}

/// Simulation engine bound to one config and a worker pool.
pub struct Engine {
    cfg: SimConfig,
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Engine { cfg, pool })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    fn run_batch(&self, scheme: Scheme, c: &Constellation, noise: &NoiseSpec, snr_index: usize, batch: u64) -> Tally {
        let mut tally = Tally::default();
        let start = batch * BATCH_TRIALS;
        let end = (start + BATCH_TRIALS).min(self.cfg.max_blocks);
        for t in start..end {
            let mut rng = trial_rng(self.cfg.seed, snr_index as u64, t);
            match run_trial(scheme, c, noise, &mut rng) {
                Some(errs) => {
                    for (acc, e) in tally.errors.iter_mut().zip(errs) {
                        *acc += u64::from(e);
                    }
                    tally.blocks += 1;
                }
                None => tally.degenerate += 1,
            }
        }
        tally
    }

    /// Simulates one scheme at grid point `snr_index` until every stream has
    /// `min_bit_errors` errors or `max_blocks` blocks have been attempted.
    pub fn run_point(&self, scheme: Scheme, snr_index: usize) -> Result<BerRecord> {
        let snr_db = *self
            .cfg
            .snr_grid_db
            .get(snr_index)
            .ok_or_else(|| Error::Config(format!("SNR index {snr_index} outside the grid")))?;
        let c = self.cfg.constellation_for(scheme);
        let noise = snr_to_sigma_sq(snr_db);
        let min_err = self.cfg.min_bit_errors;
        let total_batches = self.cfg.max_blocks.div_ceil(BATCH_TRIALS);
        let round = (2 * self.cfg.workers) as u64;

        let done = |t: &Tally| t.errors.iter().all(|&e| e >= min_err) || t.attempted() >= self.cfg.max_blocks;
        let mut tally = Tally::default();
        let mut next = 0u64;
        'outer: while next < total_batches && !done(&tally) {
            let upto = (next + round).min(total_batches);
            let results: Vec<Tally> = self.pool.install(|| {
                (next..upto).into_par_iter().map(|b| self.run_batch(scheme, &c, &noise, snr_index, b)).collect()
            });
            for r in &results {
                tally.merge(r);
                next += 1;
                if done(&tally) {
                    break 'outer;
                }
            }
        }

        let bits_per_block = c.bits_per_symbol() as u64;
        Ok(BerRecord {
            snr_db,
            scheme,
            bits: [tally.blocks * bits_per_block; 4],
            bit_errors: tally.errors,
            blocks: tally.blocks,
            degenerate: tally.degenerate,
        })
    }

    /// Runs every configured scheme over the grid, calling `progress` after
    /// each point. Records are ordered by SNR, then scheme.
    pub fn sweep_with<F: FnMut(&BerRecord)>(&self, mut progress: F) -> Result<Vec<BerRecord>> {
        let mut out = Vec::new();
        for k in 0..self.cfg.snr_grid_db.len() {
            for &scheme in self.cfg.scheme.schemes() {
                let rec = self.run_point(scheme, k)?;
                progress(&rec);
                out.push(rec);
            }
        }
        Ok(out)
    }

    pub fn sweep(&self) -> Result<Vec<BerRecord>> {
        self.sweep_with(|_| {})
    }
}

/// Records for every configured scheme at grid point `snr_index`.
pub fn run_point(cfg: &SimConfig, snr_index: usize) -> Result<Vec<BerRecord>> {
    let engine = Engine::new(cfg.clone())?;
    cfg.scheme.schemes().iter().map(|&s| engine.run_point(s, snr_index)).collect()
}

pub fn sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    Engine::new(cfg.clone())?.sweep()
}

/// Single-stream QPSK over a fixed, known scalar channel `h` at the given
/// Eb/N0: `y = h s + n`, decided by [`demap_ml`] on `h* y`. Returns
/// `(bits, bit_errors)`. Exact BER is `Q(sqrt(2 Eb/N0))`.
pub fn scalar_channel_qpsk(h: Cx, ebn0_db: f64, symbols: u64, seed: u64) -> (u64, u64) {
    let c = Constellation::qpsk();
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    // Es = 1, Eb = |h|^2 / 2 at the receiver
    let sigma = (h.norm_sqr() / (2.0 * ebn0)).sqrt();
    let gain = h.norm_sqr();
    let mut errors = 0u64;
    let batches = symbols.div_ceil(BATCH_TRIALS);
    for b in 0..batches {
        let mut rng = trial_rng(seed, u64::MAX, b);
        let n = BATCH_TRIALS.min(symbols - b * BATCH_TRIALS);
        for _ in 0..n {
            let idx = symbol_index(&mut rng, 4);
            let y = h * c.point(idx) + complex_gaussian(&mut rng) * sigma;
            errors += u64::from(c.bit_errors(idx, demap_ml(h.conj() * y, gain, &c)));
        }
    }
    (symbols * 2, errors)
}
