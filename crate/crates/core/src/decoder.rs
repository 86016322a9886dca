//! Greedy block decoder and amplitude estimation.

use crate::error::{Error, Result};
use crate::forward::{forward_map, ForwardMap, GaussianParams, SampleGrid, ScanSignal};
use crate::symbology::{Dictionary, DigitString, SPARSE_LEN};

/// Column index of the guard entry of block j (0-based block index).
const GUARD_COLUMNS: [usize; 3] = [0, 61, 122];

/// The twelve digit blocks in natural order (0-based block indices,
/// skipping the three guard blocks 0, 7, 14).
pub const DIGIT_BLOCKS: [usize; 12] = [1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 12, 13];

/// Options controlling the greedy decode.
#[derive(Debug, Clone, Default)]
pub struct DecodeOptions {
    /// When set, the selection residual for block j is restricted to the
    /// rows of I_j padded on each side by this many samples. `None` scores
    /// over all m samples.
    pub window: Option<usize>,
    /// Processing order over the twelve digit blocks (0-based block
    /// indices). `None` uses the natural left-to-right order.
    pub order: Option<[usize; 12]>,
}

/// Outcome of a greedy decode.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Recovered digits, left to right.
    pub digits: DigitString,
    /// Selected sparse-code column per digit block, in natural block order.
    pub support: [usize; 12],
    /// L1 norm of the residual after each selection step, in processing
    /// order.
    pub step_residual_l1: Vec<f64>,
    /// Final residual after all selections.
    pub residual: Vec<f64>,
    /// Amplitude used by the forward map during decoding.
    pub alpha: f64,
}

fn l1_over(v: &[f64], lo: usize, hi: usize) -> f64 {
    v[lo..hi].iter().map(|x| x.abs()).sum()
}

/// Runs the greedy block decoder against a forward map built at the
/// decoder's blur and amplitude estimates.
///
/// The guard-block contributions are subtracted up front (their columns are
/// forced by the symbology), then each digit block greedily selects the
/// candidate column minimizing the L1 norm of the updated residual.
/// Ties break toward the smaller candidate index.
pub fn greedy_decode(
    signal: &ScanSignal,
    map: &ForwardMap,
    options: &DecodeOptions,
) -> Result<DecodeResult> {
    if signal.len() != map.num_samples() {
        return Err(Error::GridMismatch {
            signal: signal.len(),
            grid: map.num_samples(),
        });
    }
    let m = map.num_samples();
    let cols = map.matrix();

    let mut residual = signal.samples.clone();
    for &g in &GUARD_COLUMNS {
        for (d, p) in residual.iter_mut().zip(cols.column(g)) {
            *d -= p;
        }
    }

    let order = options.order.unwrap_or(DIGIT_BLOCKS);
    let mut support = [usize::MAX; 12];
    let mut step_residual_l1 = Vec::with_capacity(12);

    for &block in &order {
        let (col_lo, _) = map.column_block(block);
        let (row_lo, row_hi) = map.row_set(block);
        let (score_lo, score_hi) = match options.window {
            Some(pad) => (row_lo.saturating_sub(pad), (row_hi + pad).min(m)),
            None => (0, m),
        };

        let mut best_k = 0usize;
        let mut best_score = f64::INFINITY;
        for k in 0..10 {
            let col = cols.column(col_lo + k);
            let score: f64 = residual[score_lo..score_hi]
                .iter()
                .zip(col.slice(ndarray::s![score_lo..score_hi]))
                .map(|(d, p)| (d - p).abs())
                .sum();
            if score < best_score {
                best_score = score;
                best_k = k;
            }
        }

        for (d, p) in residual.iter_mut().zip(cols.column(col_lo + best_k)) {
            *d -= p;
        }
        let digit_slot = DIGIT_BLOCKS.iter().position(|&b| b == block).unwrap();
        support[digit_slot] = col_lo + best_k;
        step_residual_l1.push(l1_over(&residual, 0, m));
    }

    let mut entries = [0u8; SPARSE_LEN];
    for &g in &GUARD_COLUMNS {
        entries[g] = 1;
    }
    for &idx in &support {
        entries[idx] = 1;
    }
    let digits = crate::symbology::x_to_digits_raw(&entries)?;

    Ok(DecodeResult {
        digits,
        support,
        step_residual_l1,
        residual,
        alpha: map.params().alpha,
    })
}

/// Least-squares amplitude estimate from the middle-guard segment.
///
/// Projects the measurements restricted to I_8 onto the unit-amplitude
/// middle-guard column at the decoder's blur estimate sigma_hat.
pub fn estimate_alpha(
    signal: &ScanSignal,
    sigma_hat: f64,
    grid: &SampleGrid,
    dict: &Dictionary,
) -> Result<f64> {
    let unit = forward_map(GaussianParams::new(sigma_hat, 1.0)?, grid, dict)?;
    estimate_alpha_with_map(signal, &unit)
}

/// As [`estimate_alpha`], reusing a prebuilt unit-amplitude forward map.
pub fn estimate_alpha_with_map(signal: &ScanSignal, unit_map: &ForwardMap) -> Result<f64> {
    if signal.len() != unit_map.num_samples() {
        return Err(Error::GridMismatch {
            signal: signal.len(),
            grid: unit_map.num_samples(),
        });
    }
    let scale = unit_map.params().alpha;
    let (lo, hi) = unit_map.row_set(7);
    let col = unit_map.matrix().column(GUARD_COLUMNS[1]);
    let mut dot = 0.0;
    let mut norm2 = 0.0;
    for k in lo..hi {
        let p = col[k] / scale;
        dot += p * signal.samples[k];
        norm2 += p * p;
    }
    Ok(dot / norm2)
}

/// Estimates the amplitude from the middle guard, then decodes with the
/// forward map rescaled to that estimate. Returns the estimate alongside
/// the decode result.
pub fn decode_with_estimation(
    signal: &ScanSignal,
    sigma_hat: f64,
    grid: &SampleGrid,
    dict: &Dictionary,
    options: &DecodeOptions,
) -> Result<(DecodeResult, f64)> {
    let unit = forward_map(GaussianParams::new(sigma_hat, 1.0)?, grid, dict)?;
    let alpha_hat = estimate_alpha_with_map(signal, &unit)?;
    let map = unit.with_alpha(alpha_hat)?;
    let result = greedy_decode(signal, &map, options)?;
    Ok((result, alpha_hat))
}
