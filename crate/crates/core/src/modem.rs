//! Gray-labelled QPSK and 16-QAM with unit average energy, and the scaled
//! nearest-point ML slicer.
//!
//! Point `i` of a constellation carries the bit label `i` (first bit is the
//! most significant), so a [`SymbolIndex`] doubles as the transmitted bit
//! group. QPSK labels: `00 -> (+,+)`, `01 -> (-,+)`, `11 -> (-,-)`,
//! `10 -> (+,-)`. 16-QAM: the first two bits pick the in-phase level and the
//! last two the quadrature level, each with the Gray map
//! `00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3` (levels scaled by `1/sqrt(10)`).

use std::fmt;
use std::str::FromStr;

use crate::cxmat::Cx;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Qam16,
}

impl Modulation {
    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "qam16",
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    pub fn constellation(self) -> Constellation {
        Constellation::new(self)
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Modulation::Qpsk),
            "qam16" | "16qam" | "16-qam" => Ok(Modulation::Qam16),
            other => Err(Error::Config(format!("unknown modulation '{other}' (expected qpsk or qam16)"))),
        }
    }
}

/// Index into [`Constellation::points`]; equal to the point's bit label.
pub type SymbolIndex = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    modulation: Modulation,
    points: Vec<Cx>,
}

/// Per-axis 2-bit Gray map onto 4-PAM levels.
const PAM4_GRAY: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let points = match modulation {
            Modulation::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                (0..4u32)
                    .map(|label| {
                        let re = if label & 0b01 == 0 { a } else { -a };
                        let im = if label & 0b10 == 0 { a } else { -a };
                        Cx::new(re, im)
                    })
                    .collect()
            }
            Modulation::Qam16 => {
                let k = 1.0 / 10f64.sqrt();
                (0..16usize).map(|label| Cx::new(PAM4_GRAY[label >> 2] * k, PAM4_GRAY[label & 0b11] * k)).collect()
            }
        };
        Constellation { modulation, points }
    }

    pub fn qpsk() -> Self {
        Self::new(Modulation::Qpsk)
    }

    pub fn qam16() -> Self {
        Self::new(Modulation::Qam16)
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn name(&self) -> &'static str {
        self.modulation.name()
    }

    pub fn points(&self) -> &[Cx] {
        &self.points
    }

    #[inline]
    pub fn point(&self, idx: SymbolIndex) -> Cx {
        self.points[idx]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.min((p - q).norm());
            }
        }
        d
    }

    /// Number of differing bits between the labels of two points.
    #[inline]
    pub fn bit_errors(&self, sent: SymbolIndex, decided: SymbolIndex) -> u32 {
        (sent ^ decided).count_ones()
    }
}

pub fn map_bits(bits: &[u8], c: &Constellation) -> Result<Vec<Cx>> {
    let k = c.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::LengthMismatch { len: bits.len(), bits_per_symbol: k });
    }
    Ok(bits
        .chunks_exact(k)
        .map(|group| {
            let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
            c.point(label)
        })
        .collect())
}

/// `argmin_p |z - scale * p|^2`, lowest index on ties.
#[inline]
pub fn demap_ml(z: Cx, scale: f64, c: &Constellation) -> SymbolIndex {
    debug_assert!(scale > 0.0);
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in c.points.iter().enumerate() {
        let d = (z - p * scale).norm_sqr();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Bit group (most significant first) carried by a symbol.
pub fn symbol_bits(idx: SymbolIndex, c: &Constellation) -> Vec<u8> {
    let k = c.bits_per_symbol();
    (0..k).rev().map(|s| ((idx >> s) & 1) as u8).collect()
}
