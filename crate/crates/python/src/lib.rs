//! Python bindings for the barscan UPC-A toolkit.
//!
//! Exposes encoding, scan synthesis, noise generation, greedy decoding,
//! recovery diagnostics, and the Monte-Carlo phase diagram.

use barscan_core::analysis;
use barscan_core::decoder::{self, DecodeOptions};
use barscan_core::forward::{forward_map, make_grid, synthesize_clean_with_map, ScanSignal};
use barscan_core::noise;
use barscan_core::phase::{self, AlphaHandling, Axis2, PhaseDiagramSpec};
use barscan_core::symbology::{self, build_dictionary, digits_to_x, x_to_digits_raw};
use barscan_core::{DigitString, GaussianParams};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: barscan_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// 95-character 0/1 bar string of a 12-digit code.
#[pyfunction]
fn encode(digits: &str) -> PyResult<String> {
    let d = DigitString::parse(digits).map_err(err)?;
    Ok(symbology::encode_digits(&d).to_string())
}

/// 123-entry 0/1 sparse representation of a 12-digit code.
#[pyfunction]
fn digits_to_sparse(digits: &str) -> PyResult<Vec<u8>> {
    let d = DigitString::parse(digits).map_err(err)?;
    Ok(digits_to_x(&d).entries().to_vec())
}

/// Digits of a well-formed 123-entry sparse code.
#[pyfunction]
fn sparse_to_digits(entries: Vec<u8>) -> PyResult<String> {
    Ok(x_to_digits_raw(&entries).map_err(err)?.to_string())
}

/// Noiseless scanner measurement of a code: 95 r samples of
/// alpha G(sigma) D x.
#[pyfunction]
fn synthesize(digits: &str, sigma: f64, alpha: f64, r: usize) -> PyResult<Vec<f64>> {
    let d = DigitString::parse(digits).map_err(err)?;
    let dict = build_dictionary();
    let grid = make_grid(r).map_err(err)?;
    let params = GaussianParams::new(sigma, alpha).map_err(err)?;
    let map = forward_map(params, &grid, &dict).map_err(err)?;
    Ok(synthesize_clean_with_map(&d, &map).samples)
}

/// Noise with L2 norm nu times the clean signal's norm; deterministic in
/// the seed.
#[pyfunction]
fn relative_noise(clean: Vec<f64>, r: usize, nu: f64, seed: u64) -> PyResult<Vec<f64>> {
    let signal = ScanSignal::new(clean, r).map_err(err)?;
    noise::relative_noise(&signal, nu, seed).map_err(err)
}

/// m iid N(0, xi^2) draws; deterministic in the seed.
#[pyfunction]
fn absolute_noise(m: usize, xi: f64, seed: u64) -> PyResult<Vec<f64>> {
    noise::absolute_noise(m, xi, seed).map_err(err)
}

/// Greedy decode outcome.
#[pyclass]
struct DecodeResult {
    /// Recovered 12-digit string.
    #[pyo3(get)]
    digits: String,
    /// Amplitude the decoder used (given or estimated).
    #[pyo3(get)]
    alpha: f64,
    /// Residual L1 norm after each of the 12 selections.
    #[pyo3(get)]
    step_residual_l1: Vec<f64>,
}

/// Greedily decodes a sampled signal. When alpha_hat is omitted the
/// amplitude is estimated from the middle guard. window, when given, is a
/// pad in bars around each block's rows for candidate scoring.
#[pyfunction]
#[pyo3(signature = (samples, r, sigma_hat, alpha_hat=None, window=None))]
fn decode(
    samples: Vec<f64>,
    r: usize,
    sigma_hat: f64,
    alpha_hat: Option<f64>,
    window: Option<usize>,
) -> PyResult<DecodeResult> {
    let signal = ScanSignal::new(samples, r).map_err(err)?;
    let dict = build_dictionary();
    let grid = make_grid(r).map_err(err)?;
    let unit = forward_map(GaussianParams::new(sigma_hat, 1.0).map_err(err)?, &grid, &dict)
        .map_err(err)?;
    let alpha = match alpha_hat {
        Some(a) => a,
        None => decoder::estimate_alpha_with_map(&signal, &unit).map_err(err)?,
    };
    let map = unit.with_alpha(alpha).map_err(err)?;
    let options = DecodeOptions {
        window: window.map(|bars| bars * r),
        order: None,
    };
    let result = decoder::greedy_decode(&signal, &map, &options).map_err(err)?;
    Ok(DecodeResult {
        digits: result.digits.to_string(),
        alpha,
        step_residual_l1: result.step_residual_l1,
    })
}

/// Concentration/separation diagnostics of the forward map.
#[pyclass]
struct Diagnostics {
    #[pyo3(get)]
    epsilon: f64,
    #[pyo3(get)]
    mu: f64,
    #[pyo3(get)]
    mu_restricted: f64,
    /// True iff the noiseless recovery condition holds in every block.
    #[pyo3(get)]
    recovery_guaranteed: bool,
}

/// Computes epsilon, mu, and the noiseless recovery-condition check for
/// the forward map at (sigma, alpha, r).
#[pyfunction]
fn diagnostics(sigma: f64, alpha: f64, r: usize) -> PyResult<Diagnostics> {
    let dict = build_dictionary();
    let grid = make_grid(r).map_err(err)?;
    let map = forward_map(GaussianParams::new(sigma, alpha).map_err(err)?, &grid, &dict)
        .map_err(err)?;
    let d = analysis::block_diagnostics(&map);
    let check = analysis::check_recovery_condition(&map, &[]).map_err(err)?;
    Ok(Diagnostics {
        epsilon: d.epsilon,
        mu: d.mu,
        mu_restricted: d.mu_restricted,
        recovery_guaranteed: check.satisfied,
    })
}

/// Per-block noise ceiling alpha r (e^-sigma - (6/5) sigma).
#[pyfunction]
fn noise_ceiling(sigma: f64, alpha: f64, r: usize) -> f64 {
    analysis::noise_ceiling(sigma, alpha, r)
}

/// Blur-mismatch bound B(sigma, sigma_hat); gterm_bound = 7 r B.
#[pyfunction]
#[pyo3(signature = (sigma, sigma_hat, r=1))]
fn sigma_bound(sigma: f64, sigma_hat: f64, r: usize) -> PyResult<(f64, u64, f64)> {
    let s = analysis::sigma_bound(sigma, sigma_hat).map_err(err)?;
    Ok((s.b, s.j1, analysis::gterm_bound(&s, r)))
}

/// Phase-diagram outcome: per-cell success counts, axis-1 major.
#[pyclass]
struct PhaseDiagram {
    #[pyo3(get)]
    sigma_hat: Vec<f64>,
    #[pyo3(get)]
    axis2: Vec<f64>,
    #[pyo3(get)]
    successes: Vec<u32>,
    #[pyo3(get)]
    trials: usize,
    csv: String,
}

#[pymethods]
impl PhaseDiagram {
    /// Success probability of cell (i, j).
    fn probability(&self, i: usize, j: usize) -> f64 {
        self.successes[i * self.axis2.len() + j] as f64 / self.trials as f64
    }

    /// CSV rendering: sigma_hat,axis2,successes,trials,probability.
    fn csv(&self) -> String {
        self.csv.clone()
    }
}

/// Runs the Monte-Carlo experiment over a (sigma_hat, noise) grid.
/// Exactly one of nu/xi selects the noise model.
#[pyfunction]
#[pyo3(signature = (sigma, alpha, r, sigma_hat, nu=None, xi=None, trials=100, seed=0, estimate_alpha=false))]
#[allow(clippy::too_many_arguments)]
fn phase_diagram(
    sigma: f64,
    alpha: f64,
    r: usize,
    sigma_hat: Vec<f64>,
    nu: Option<Vec<f64>>,
    xi: Option<Vec<f64>>,
    trials: usize,
    seed: u64,
    estimate_alpha: bool,
) -> PyResult<PhaseDiagram> {
    let axis2 = match (nu, xi) {
        (Some(v), None) => Axis2::Nu(v),
        (None, Some(v)) => Axis2::Xi(v),
        _ => return Err(PyValueError::new_err("pass exactly one of nu= or xi=")),
    };
    let spec = PhaseDiagramSpec {
        sigma,
        alpha,
        r,
        sigma_hat,
        axis2,
        trials,
        seed,
        alpha_handling: if estimate_alpha {
            AlphaHandling::Estimated
        } else {
            AlphaHandling::Known
        },
    };
    let result = phase::run_phase_diagram(&spec).map_err(err)?;
    Ok(PhaseDiagram {
        sigma_hat: spec.sigma_hat.clone(),
        axis2: spec.axis2.values().to_vec(),
        successes: result.successes.clone(),
        trials,
        csv: phase::format_csv(&result),
    })
}

#[pymodule]
fn barscan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(digits_to_sparse, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_to_digits, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(relative_noise, m)?)?;
    m.add_function(wrap_pyfunction!(absolute_noise, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(diagnostics, m)?)?;
    m.add_function(wrap_pyfunction!(noise_ceiling, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_bound, m)?)?;
    m.add_function(wrap_pyfunction!(phase_diagram, m)?)?;
    m.add_class::<DecodeResult>()?;
    m.add_class::<Diagnostics>()?;
    m.add_class::<PhaseDiagram>()?;
    Ok(())
}
