use super::{BerRecord, Stream};
use crate::error::{Error, Result};

pub const DEFAULT_DIVERSITY_WINDOW_DB: (f64, f64) = (20.0, 30.0);

/// Least-squares slope of `-log10(BER)` against `SNR_dB / 10`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityEstimate {
    pub stream: Stream,
    pub window_db: (f64, f64),
    pub d_hat: f64,
    /// Slopes between consecutive qualifying points.
    pub segment_slopes: Vec<f64>,
    /// `(snr_db, ber)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

/// Fits the diversity order of `stream` over records inside `window`
/// (inclusive) that have at least `min_errors` errors on that stream.
/// Fewer than two such points is [`Error::InsufficientData`].
pub fn estimate_diversity(
    records: &[BerRecord],
    stream: Stream,
    window: (f64, f64),
    min_errors: u64,
) -> Result<DiversityEstimate> {
    let i = stream.index();
    let mut points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.snr_db >= window.0 && r.snr_db <= window.1 && r.snr_db.is_finite())
        .filter(|r| r.bit_errors[i] >= min_errors && r.bit_errors[i] > 0)
        .map(|r| (r.snr_db, r.ber(stream)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    if points.len() < 2 {
        return Err(Error::InsufficientData { qualifying: points.len() });
    }

    let xy: Vec<(f64, f64)> = points.iter().map(|&(s, b)| (s / 10.0, -b.log10())).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let segment_slopes = xy.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();

    Ok(DiversityEstimate { stream, window_db: window, d_hat: sxy / sxx, segment_slopes, points })
}
