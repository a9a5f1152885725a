//! Link-level simulator for Alamouti-coded interference cancellation on the
//! two-user 2x2 MIMO Z channel.
//!
//! User 1 talks to receiver 1 only. User 2 talks to receiver 2, which also
//! hears user 1. Both users send Alamouti blocks; receiver 2 zero-forces
//! user 1 per antenna, subtracts the two antenna outputs and is left with an
//! interference-free Alamouti-structured link for user 2.

pub mod alamouti;
pub mod baselines;
pub mod channel;
pub mod cxmat;
pub mod error;
pub mod harness;
pub mod ic_rx;
pub mod modem;
pub mod rng;
pub mod selfcheck;

pub use alamouti::{encode, rx1_decode, Codeword, Rx1Decision};
pub use channel::{draw_channel, snr_to_sigma_sq, transmit_block, NoiseSpec, RxBlock, ZChannelRealization};
pub use cxmat::{Cx, Mat2, Vec2};
pub use error::{Error, Result};
pub use harness::{estimate_diversity, sweep, BerRecord, DiversityEstimate, Scheme, SchemeSel, SimConfig, Stream};
pub use ic_rx::{rx2_decode, EffChannel, Rx2Decision};
pub use modem::{demap_ml, map_bits, Constellation, Modulation};
