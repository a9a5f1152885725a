use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{BerRecord, DiversityEstimate, Scheme, SimConfig, Stream};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = ["snr_db", "scheme", "stream", "bits", "bit_errors", "ber", "blocks", "degenerate"];
pub const DIVERSITY_CSV_HEADER: [&str; 4] = ["stream", "window_lo_db", "window_hi_db", "d_hat"];

fn fmt_snr(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

/// One row per (SNR, scheme, stream), in record order.
pub fn write_csv<W: Write>(records: &[BerRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        for s in Stream::ALL {
            let i = s.index();
            w.write_record([
                fmt_snr(r.snr_db),
                r.scheme.name().to_string(),
                s.name().to_string(),
                r.bits[i].to_string(),
                r.bit_errors[i].to_string(),
                format!("{:.6e}", r.ber(s)),
                r.blocks.to_string(),
                r.degenerate.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diversity_csv<W: Write>(estimates: &[DiversityEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIVERSITY_CSV_HEADER)?;
    for e in estimates {
        w.write_record([
            e.stream.name().to_string(),
            e.window_db.0.to_string(),
            e.window_db.1.to_string(),
            format!("{:.6}", e.d_hat),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BerRecord], path: &Path) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn emit_diversity_csv(estimates: &[DiversityEstimate], path: &Path) -> Result<()> {
    write_diversity_csv(estimates, std::fs::File::create(path)?)
}

/// Parses a BER CSV back into records. Rows of the same (SNR, scheme) are
/// folded into one record; the four streams must all be present.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BerRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Config("CSV header does not match the BER schema".into()));
    }
    let bad = |what: &str, v: &str| Error::Config(format!("CSV: bad {what} '{v}'"));
    let mut out: Vec<(BerRecord, u8)> = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |k: usize| row.get(k).unwrap_or("");
        let int = |k: usize| f(k).parse::<u64>().map_err(|_| bad(CSV_HEADER[k], f(k)));
        let snr_db = match f(0) {
            "inf" => f64::INFINITY,
            v => v.parse::<f64>().map_err(|_| bad("snr_db", v))?,
        };
        let scheme: Scheme = f(1).parse()?;
        let stream: Stream = f(2).parse()?;
        let (blocks, degenerate) = (int(6)?, int(7)?);
        let fresh = match out.last() {
            Some((r, _)) => r.snr_db != snr_db || r.scheme != scheme,
            None => true,
        };
        if fresh {
            out.push((BerRecord { snr_db, scheme, bits: [0; 4], bit_errors: [0; 4], blocks, degenerate }, 0));
        }
        let (rec, seen) = out.last_mut().expect("pushed above");
        let i = stream.index();
        rec.bits[i] = int(3)?;
        rec.bit_errors[i] = int(4)?;
        *seen |= 1 << i;
    }
    out.into_iter()
        .map(|(r, seen)| {
            if seen == 0b1111 {
                Ok(r)
            } else {
                Err(Error::Config(format!("CSV: incomplete streams at {} dB ({})", r.snr_db, r.scheme)))
            }
        })
        .collect()
}

/// Human-readable run description written next to the CSV.
pub fn metadata_lines(cfg: &SimConfig, diversity: &[DiversityEstimate]) -> Vec<String> {
    let grid: Vec<String> = cfg.snr_grid_db.iter().map(|&x| fmt_snr(x)).collect();
    let mut lines = vec![
        format!("schemes = {}", cfg.scheme.schemes().iter().map(|s| s.name()).collect::<Vec<_>>().join(",")),
        format!("modulation = {}", cfg.modulation.name()),
        format!("snr_grid_db = {}", grid.join(",")),
        format!("min_bit_errors = {}", cfg.min_bit_errors),
        format!("max_blocks = {}", cfg.max_blocks),
        format!("seed = {}", cfg.seed),
        format!("publishable = {}", cfg.publishable()),
        "snr_definition = rho = 1/sigma_sq; unit average transmit power per channel use, split over the antennas"
            .into(),
        "fading = i.i.d. CN(0,1) entries, quasi-static over one block, redrawn per block".into(),
    ];
    if cfg.scheme.schemes().contains(&Scheme::Tdma) {
        lines.push(
            "tdma_baseline = users alternate slots; 16-QAM at full power on the dominant right singular vector \
             of the link, receive matched filter; 2 bits per channel use per user"
                .into(),
        );
    }
    for d in diversity {
        lines.push(format!("d_hat[{}; {}..{} dB] = {:.4}", d.stream, d.window_db.0, d.window_db.1, d.d_hat));
    }
    lines
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

/// Writes [`metadata_lines`] to `<out>.meta`.
pub fn write_metadata(out: &Path, cfg: &SimConfig, diversity: &[DiversityEstimate]) -> Result<PathBuf> {
    let path = meta_path(out);
    let mut text = metadata_lines(cfg, diversity).join("\n");
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
