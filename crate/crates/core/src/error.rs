use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NonHermitianInput { asymmetry: f64 },

    #[error("bit sequence length {len} is not a multiple of {bits_per_symbol}")]
    LengthMismatch { len: usize, bits_per_symbol: usize },

    #[error("degenerate channel: gain {gain:.3e} below threshold")]
    DegenerateChannel { gain: f64 },

    #[error("degenerate effective channel: |a|^2+|b|^2 = {gain:.3e}")]
    DegenerateEffChannel { gain: f64 },

    #[error("insufficient data: {qualifying} qualifying point(s) in window, need 2")]
    InsufficientData { qualifying: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for the measure-zero channel singularities that the harness
    /// tallies separately instead of counting as bit errors.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateChannel { .. } | Error::DegenerateEffChannel { .. })
    }
}
