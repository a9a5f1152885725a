//! Python bindings. Matrices cross the boundary as nested lists of
//! `complex`, indexed `[row][col]` like the Rust types.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use zchan::alamouti::{encode as encode_block, rx1_decode as rx1_decode_block};
use zchan::channel::{draw_channel as draw_realization, NoiseSpec, RxBlock};
use zchan::cxmat::Mat2;
use zchan::harness::{self, BerRecord, Scheme, SchemeSel, SimConfig, Stream};
use zchan::ic_rx::{cancel_and_extract, zero_force_user1};
use zchan::modem::{demap_ml, Constellation, Modulation};
use zchan::rng::trial_rng;
use zchan::Error;

type PyMat = [[Complex64; 2]; 2];

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Csv(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn constellation(name: &str) -> PyResult<Constellation> {
    Ok(name.parse::<Modulation>().map_err(to_py_err)?.constellation())
}

/// Constellation points in label order.
#[pyfunction]
#[pyo3(signature = (modulation = "qpsk"))]
fn points(modulation: &str) -> PyResult<Vec<Complex64>> {
    Ok(constellation(modulation)?.points().to_vec())
}

#[pyfunction]
#[pyo3(signature = (bits, modulation = "qpsk"))]
fn map_bits(bits: Vec<u8>, modulation: &str) -> PyResult<Vec<Complex64>> {
    zchan::modem::map_bits(&bits, &constellation(modulation)?).map_err(to_py_err)
}

/// Index of the point closest to `z / scale`.
#[pyfunction]
#[pyo3(signature = (z, scale = 1.0, modulation = "qpsk"))]
fn demap(z: Complex64, scale: f64, modulation: &str) -> PyResult<usize> {
    Ok(demap_ml(z, scale, &constellation(modulation)?))
}

#[pyfunction]
fn encode(s1: Complex64, s2: Complex64) -> PyMat {
    encode_block(s1, s2).0 .0
}

/// The three links drawn for trial `(seed, snr_index, trial)`.
#[pyfunction]
#[pyo3(signature = (seed, snr_index = 0, trial = 0))]
fn draw_channel<'py>(py: Python<'py>, seed: u64, snr_index: u64, trial: u64) -> PyResult<Bound<'py, PyDict>> {
    let ch = draw_realization(&mut trial_rng(seed, snr_index, trial));
    let d = PyDict::new(py);
    d.set_item("h_11", ch.h_11.0)?;
    d.set_item("h_12", ch.h_12.0)?;
    d.set_item("h_22", ch.h_22.0)?;
    Ok(d)
}

/// `(s1_idx, s2_idx, combined_gain)` for receiver 1.
#[pyfunction]
#[pyo3(signature = (rx1, h_11, modulation = "qpsk"))]
fn rx1_decode(rx1: PyMat, h_11: PyMat, modulation: &str) -> PyResult<(usize, usize, f64)> {
    let d = rx1_decode_block(&RxBlock(Mat2(rx1)), &Mat2(h_11), &constellation(modulation)?).map_err(to_py_err)?;
    Ok((d.s1_idx, d.s2_idx, d.combined_gain))
}

/// `(s1_idx, s2_idx, eff_gain)` for user 2 at receiver 2.
#[pyfunction]
#[pyo3(signature = (rx2, h_12, h_22, sigma_sq, modulation = "qpsk"))]
fn rx2_decode(rx2: PyMat, h_12: PyMat, h_22: PyMat, sigma_sq: f64, modulation: &str) -> PyResult<(usize, usize, f64)> {
    let d = zchan::ic_rx::rx2_decode(
        &RxBlock(Mat2(rx2)),
        &Mat2(h_12),
        &Mat2(h_22),
        &NoiseSpec { sigma_sq },
        &constellation(modulation)?,
    )
    .map_err(to_py_err)?;
    Ok((d.s1_idx, d.s2_idx, d.eff_gain))
}

/// Effective user-2 channel after cancellation, with the combined
/// observation `y_hat` when `rx2` is given.
#[pyfunction]
#[pyo3(signature = (h_12, h_22, sigma_sq, rx2 = None))]
fn effective_channel<'py>(
    py: Python<'py>,
    h_12: PyMat,
    h_22: PyMat,
    sigma_sq: f64,
    rx2: Option<PyMat>,
) -> PyResult<Bound<'py, PyDict>> {
    let (h_12, h_22) = (Mat2(h_12), Mat2(h_22));
    let rx = RxBlock(Mat2(rx2.unwrap_or([[Complex64::new(0.0, 0.0); 2]; 2])));
    let zf = zero_force_user1(&rx, &h_12).map_err(to_py_err)?;
    let (obs, eff) = cancel_and_extract(&zf, &h_12, &h_22, &NoiseSpec { sigma_sq }).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("a", eff.a)?;
    d.set_item("b", eff.b)?;
    d.set_item("g1", eff.g1)?;
    d.set_item("g2", eff.g2)?;
    d.set_item("noise_scale", eff.noise_scale)?;
    d.set_item("h_hat", eff.h_hat().0)?;
    if rx2.is_some() {
        d.set_item("y_hat", obs.y_hat)?;
    }
    Ok(d)
}

/// Error statistics of one scheme at one SNR point.
#[pyclass(name = "BerRecord", frozen)]
#[derive(Clone)]
struct PyBerRecord(BerRecord);

#[pymethods]
impl PyBerRecord {
    #[getter]
    fn snr_db(&self) -> f64 {
        self.0.snr_db
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.scheme.name()
    }

    #[getter]
    fn blocks(&self) -> u64 {
        self.0.blocks
    }

    #[getter]
    fn degenerate(&self) -> u64 {
        self.0.degenerate
    }

    /// Per-stream `(name, bits, bit_errors, ber)`.
    #[getter]
    fn streams(&self) -> Vec<(&'static str, u64, u64, f64)> {
        Stream::ALL
            .iter()
            .map(|&s| (s.name(), self.0.bits[s.index()], self.0.bit_errors[s.index()], self.0.ber(s)))
            .collect()
    }

    fn ber(&self, stream: &str) -> PyResult<f64> {
        Ok(self.0.ber(stream.parse().map_err(to_py_err)?))
    }

    fn user_average_ber(&self) -> f64 {
        self.0.user_average_ber()
    }

    fn __repr__(&self) -> String {
        format!(
            "BerRecord(snr_db={}, scheme='{}', blocks={}, bit_errors={:?})",
            self.0.snr_db, self.0.scheme, self.0.blocks, self.0.bit_errors
        )
    }
}

fn build_config(
    scheme: &str,
    modulation: &str,
    snr: &str,
    min_errors: u64,
    max_blocks: u64,
    seed: u64,
    workers: Option<usize>,
) -> zchan::Result<SimConfig> {
    let cfg = SimConfig {
        scheme: scheme.parse::<SchemeSel>()?,
        modulation: modulation.parse()?,
        snr_grid_db: harness::parse_snr_grid(snr)?,
        min_bit_errors: min_errors,
        max_blocks,
        seed,
        workers: workers.unwrap_or(SimConfig::default().workers),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a BER sweep. `snr` is `"lo:step:hi"` in dB or a single value.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (
    scheme = "ic", modulation = "qpsk", snr = "0:2.5:30",
    min_errors = harness::DEFAULT_MIN_BIT_ERRORS, max_blocks = harness::DEFAULT_MAX_BLOCKS,
    seed = harness::DEFAULT_SEED, workers = None,
))]
fn sweep(
    py: Python<'_>,
    scheme: &str,
    modulation: &str,
    snr: &str,
    min_errors: u64,
    max_blocks: u64,
    seed: u64,
    workers: Option<usize>,
) -> PyResult<Vec<PyBerRecord>> {
    let cfg = build_config(scheme, modulation, snr, min_errors, max_blocks, seed, workers).map_err(to_py_err)?;
    let recs = py.allow_threads(|| harness::sweep(&cfg)).map_err(to_py_err)?;
    Ok(recs.into_iter().map(PyBerRecord).collect())
}

/// `(d_hat, segment_slopes)` for one stream over `window` (dB).
#[pyfunction]
#[pyo3(signature = (records, stream, window = harness::DEFAULT_DIVERSITY_WINDOW_DB, min_errors = harness::DEFAULT_MIN_BIT_ERRORS, scheme = "ic"))]
fn estimate_diversity(
    records: Vec<PyBerRecord>,
    stream: &str,
    window: (f64, f64),
    min_errors: u64,
    scheme: &str,
) -> PyResult<(f64, Vec<f64>)> {
    let scheme: Scheme = scheme.parse().map_err(to_py_err)?;
    let recs: Vec<BerRecord> = records.into_iter().map(|r| r.0).filter(|r| r.scheme == scheme).collect();
    let d = harness::estimate_diversity(&recs, stream.parse().map_err(to_py_err)?, window, min_errors)
        .map_err(to_py_err)?;
    Ok((d.d_hat, d.segment_slopes))
}

/// Records serialized with the CSV schema used by the CLI.
#[pyfunction]
fn to_csv(records: Vec<PyBerRecord>) -> PyResult<String> {
    let recs: Vec<BerRecord> = records.into_iter().map(|r| r.0).collect();
    let mut buf = Vec::new();
    harness::write_csv(&recs, &mut buf).map_err(to_py_err)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn zchan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBerRecord>()?;
    m.add_function(wrap_pyfunction!(points, m)?)?;
    m.add_function(wrap_pyfunction!(map_bits, m)?)?;
    m.add_function(wrap_pyfunction!(demap, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(draw_channel, m)?)?;
    m.add_function(wrap_pyfunction!(rx1_decode, m)?)?;
    m.add_function(wrap_pyfunction!(rx2_decode, m)?)?;
    m.add_function(wrap_pyfunction!(effective_channel, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_diversity, m)?)?;
    m.add_function(wrap_pyfunction!(to_csv, m)?)?;
    m.add("CSV_HEADER", harness::CSV_HEADER.join(","))?;
    Ok(())
}
