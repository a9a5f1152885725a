use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modem::{Constellation, Modulation};

/// A single receiver chain simulated by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Alamouti at both users, MRC at receiver 1, interference cancellation
    /// at receiver 2.
    Ic,
    /// Rate-matched TDMA with eigen-beamforming, 16-QAM.
    Tdma,
    /// Same transmission as `Ic`, decoded by exhaustive joint ML.
    Oracle,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ic => "ic",
            Scheme::Tdma => "tdma",
            Scheme::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ic" => Ok(Scheme::Ic),
            "tdma" => Ok(Scheme::Tdma),
            "oracle" => Ok(Scheme::Oracle),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Scheme selection as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSel {
    Ic,
    Tdma,
    Both,
    Oracle,
}

impl SchemeSel {
    pub fn schemes(self) -> &'static [Scheme] {
        match self {
            SchemeSel::Ic => &[Scheme::Ic],
            SchemeSel::Tdma => &[Scheme::Tdma],
            SchemeSel::Both => &[Scheme::Ic, Scheme::Tdma],
            SchemeSel::Oracle => &[Scheme::Oracle],
        }
    }
}

impl FromStr for SchemeSel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ic" => Ok(SchemeSel::Ic),
            "tdma" => Ok(SchemeSel::Tdma),
            "both" => Ok(SchemeSel::Both),
            "oracle" => Ok(SchemeSel::Oracle),
            other => Err(Error::Config(format!("unknown scheme '{other}' (expected ic, tdma, both or oracle)"))),
        }
    }
}

pub const DEFAULT_MIN_BIT_ERRORS: u64 = 200;
pub const DEFAULT_MAX_BLOCKS: u64 = 2_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// Below this the error counts are too small to publish.
pub const PUBLISHABLE_MIN_ERRORS: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: SchemeSel,
    /// Constellation for the Alamouti schemes. TDMA always uses 16-QAM, the
    /// rate match for QPSK.
    pub modulation: Modulation,
    pub snr_grid_db: Vec<f64>,
    /// Per-point stopping rule: every stream must reach this many errors.
    pub min_bit_errors: u64,
    pub max_blocks: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: SchemeSel::Ic,
            modulation: Modulation::Qpsk,
            snr_grid_db: snr_range(0.0, 2.5, 30.0),
            min_bit_errors: DEFAULT_MIN_BIT_ERRORS,
            max_blocks: DEFAULT_MAX_BLOCKS,
            seed: DEFAULT_SEED,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|x| x.is_nan() || **x == f64::NEG_INFINITY) {
            return Err(Error::Config(format!("invalid SNR value {bad}")));
        }
        if !self.snr_grid_db.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("SNR grid must be strictly ascending".into()));
        }
        if self.min_bit_errors == 0 {
            return Err(Error::Config("min_bit_errors must be at least 1".into()));
        }
        if self.max_blocks == 0 {
            return Err(Error::Config("max_blocks must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.scheme == SchemeSel::Both && self.modulation != Modulation::Qpsk {
            return Err(Error::Config(
                "scheme 'both' compares at equal rate and needs qpsk (tdma runs the matching 16-QAM)".into(),
            ));
        }
        Ok(())
    }

    pub fn constellation_for(&self, scheme: Scheme) -> Constellation {
        match scheme {
            Scheme::Tdma => Constellation::qam16(),
            Scheme::Ic | Scheme::Oracle => self.modulation.constellation(),
        }
    }

    pub fn publishable(&self) -> bool {
        self.min_bit_errors >= PUBLISHABLE_MIN_ERRORS
    }

    /// Applies `key=value` settings (keys as the long CLI flags, without the
    /// leading dashes).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |what: &str| -> Result<u64> {
            value.parse::<u64>().map_err(|_| Error::Config(format!("{what}: expected an integer, got '{value}'")))
        };
        match key.trim() {
            "scheme" => self.scheme = value.parse()?,
            "mod" => self.modulation = value.parse()?,
            "snr" => self.snr_grid_db = parse_snr_grid(value)?,
            "min-errors" => self.min_bit_errors = num("min-errors")?,
            "max-blocks" => self.max_blocks = num("max-blocks")?,
            "seed" => self.seed = num("seed")?,
            "workers" => self.workers = num("workers")? as usize,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn snr_range(lo: f64, step: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor();
    if !n.is_finite() || n < 0.0 {
        return Vec::new();
    }
    (0..=n as usize).map(|k| lo + k as f64 * step).collect()
}

/// Parses `lo:step:hi` (dB). A single number gives a one-point grid.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad SNR value '{s}' in '{spec}'")));
    let grid = match parts.as_slice() {
        [one] => vec![num(one)?],
        [lo, step, hi] => {
            let (lo, step, hi) = (num(lo)?, num(step)?, num(hi)?);
            if step.is_nan() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("SNR grid '{spec}' needs finite bounds and a positive step")));
            }
            snr_range(lo, step, hi)
        }
        _ => return Err(Error::Config(format!("SNR grid '{spec}' is not lo:step:hi"))),
    };
    if grid.is_empty() {
        return Err(Error::Config(format!("SNR grid '{spec}' is empty")));
    }
    Ok(grid)
}

/// Reads `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
        out.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config_text(&std::fs::read_to_string(path)?)
}
