//! Sampling grid, Gaussian blur matrix, and the forward map from sparse
//! codes to scanner measurements.

use crate::error::{Error, Result};
use crate::special::std_normal_cdf;
use crate::symbology::{
    column_block_spans, digits_to_x, row_block_spans, Dictionary, DigitString, NUM_BARS, NUM_BLOCKS,
    SPARSE_LEN,
};
use ndarray::Array2;

/// Gaussian beam parameters: standard deviation in minimum-bar-width units
/// and the amplitude multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub sigma: f64,
    pub alpha: f64,
}

impl GaussianParams {
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::NegativeSigma(sigma));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::BadAlpha(alpha));
        }
        Ok(GaussianParams { sigma, alpha })
    }
}

/// Equally spaced sample times covering the 95 unit bars.
///
/// Midpoint convention: t_i = (i - 1/2)/r, so each bar contains exactly r
/// samples and no sample falls on a bar boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleGrid {
    r: usize,
}

impl SampleGrid {
    pub fn oversampling(&self) -> usize {
        self.r
    }

    /// Total sample count m = 95 r.
    pub fn len(&self) -> usize {
        NUM_BARS * self.r
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample time of sample k (0-based).
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.r as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Row index sets I_1..I_15 as consecutive half-open sample ranges with
    /// sizes 3r, 7r x 6, 5r, 7r x 6, 3r.
    pub fn row_index_sets(&self) -> [(usize, usize); NUM_BLOCKS] {
        let mut sets = [(0usize, 0usize); NUM_BLOCKS];
        for (j, (lo, hi)) in row_block_spans().iter().enumerate() {
            sets[j] = (lo * self.r, hi * self.r);
        }
        sets
    }
}

/// Builds the midpoint sampling grid for oversampling ratio r.
pub fn make_grid(r: usize) -> Result<SampleGrid> {
    if r < 1 {
        return Err(Error::BadOversampling(r));
    }
    Ok(SampleGrid { r })
}

/// The m x 95 blur matrix: entry (k, j) is the mass of the unit Gaussian
/// centered at t_k over bar j.
#[derive(Debug, Clone)]
pub struct BlurMatrix {
    entries: Array2<f64>,
    sigma: f64,
    grid: SampleGrid,
}

impl BlurMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    /// Applies the blur to a 95-entry bar vector.
    pub fn apply(&self, bars: &[f64]) -> Vec<f64> {
        debug_assert_eq!(bars.len(), NUM_BARS);
        let m = self.grid.len();
        let mut out = vec![0.0; m];
        for (k, o) in out.iter_mut().enumerate() {
            let row = self.entries.row(k);
            *o = row.iter().zip(bars).map(|(g, c)| g * c).sum();
        }
        out
    }
}

/// Builds the blur matrix for sigma > 0 on the given grid:
/// G_{kj} = Phi((t_k - j + 1)/sigma) - Phi((t_k - j)/sigma) with 1-based j.
pub fn blur_matrix(sigma: f64, grid: &SampleGrid) -> Result<BlurMatrix> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let m = grid.len();
    let mut entries = Array2::<f64>::zeros((m, NUM_BARS));
    for k in 0..m {
        let t = grid.time(k);
        // Phi((t - j)/sigma) for j = 0..=95, then difference consecutive values.
        let mut prev = std_normal_cdf(t / sigma);
        for j in 0..NUM_BARS {
            let next = std_normal_cdf((t - (j as f64 + 1.0)) / sigma);
            entries[(k, j)] = prev - next;
            prev = next;
        }
    }
    Ok(BlurMatrix {
        entries,
        sigma,
        grid: grid.clone(),
    })
}

/// The zero-blur limit: G_{kj} = 1 iff t_k lies in bar j.
pub fn indicator_matrix(grid: &SampleGrid) -> BlurMatrix {
    let m = grid.len();
    let mut entries = Array2::<f64>::zeros((m, NUM_BARS));
    for k in 0..m {
        // With the midpoint grid, t_k in (j-1, j] means j = ceil(t_k).
        let j = grid.time(k).ceil() as usize;
        entries[(k, j - 1)] = 1.0;
    }
    BlurMatrix {
        entries,
        sigma: 0.0,
        grid: grid.clone(),
    }
}

/// Builds the blur matrix for sigma >= 0, dispatching to the indicator
/// matrix at sigma = 0.
pub fn blur_or_indicator(sigma: f64, grid: &SampleGrid) -> Result<BlurMatrix> {
    if sigma == 0.0 {
        Ok(indicator_matrix(grid))
    } else {
        blur_matrix(sigma, grid)
    }
}

/// The forward map P = alpha G(sigma) D with its 15-block column partition
/// and consecutive row index sets.
#[derive(Debug, Clone)]
pub struct ForwardMap {
    columns: Array2<f64>,
    params: GaussianParams,
    grid: SampleGrid,
}

impl ForwardMap {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.columns
    }

    pub fn params(&self) -> GaussianParams {
        self.params
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn num_samples(&self) -> usize {
        self.grid.len()
    }

    /// Column span (half-open) of block j (0-based block index).
    pub fn column_block(&self, j: usize) -> (usize, usize) {
        column_block_spans()[j]
    }

    /// Row index set (half-open) of block j (0-based block index).
    pub fn row_set(&self, j: usize) -> (usize, usize) {
        self.grid.row_index_sets()[j]
    }

    /// The same map with a different amplitude; columns are rescaled by
    /// new_alpha / alpha.
    pub fn with_alpha(&self, new_alpha: f64) -> Result<ForwardMap> {
        let params = GaussianParams::new(self.params.sigma, new_alpha)?;
        let scale = new_alpha / self.params.alpha;
        Ok(ForwardMap {
            columns: &self.columns * scale,
            params,
            grid: self.grid.clone(),
        })
    }

    /// Applies the map to a sparse 0/1 code given by its support.
    pub fn apply_support(&self, support: &[usize]) -> Vec<f64> {
        let m = self.num_samples();
        let mut out = vec![0.0; m];
        for &idx in support {
            for (o, v) in out.iter_mut().zip(self.columns.column(idx)) {
                *o += v;
            }
        }
        out
    }
}

/// Builds P = alpha G(sigma) D. sigma = 0 uses the indicator matrix.
pub fn forward_map(
    params: GaussianParams,
    grid: &SampleGrid,
    dict: &Dictionary,
) -> Result<ForwardMap> {
    let blur = blur_or_indicator(params.sigma, grid)?;
    Ok(forward_map_from_blur(params.alpha, &blur, dict))
}

/// Builds P from a prebuilt blur matrix.
pub fn forward_map_from_blur(alpha: f64, blur: &BlurMatrix, dict: &Dictionary) -> ForwardMap {
    let mut columns = blur.entries().dot(dict.matrix());
    columns *= alpha;
    debug_assert_eq!(columns.dim(), (blur.grid().len(), SPARSE_LEN));
    ForwardMap {
        columns,
        params: GaussianParams {
            sigma: blur.sigma(),
            alpha,
        },
        grid: blur.grid().clone(),
    }
}

/// A measurement vector with its sampling metadata and, when synthesized,
/// the provenance of the simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSignal {
    pub samples: Vec<f64>,
    pub r: usize,
    pub provenance: Provenance,
}

/// Synthesis metadata carried by simulated signals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub digits: Option<DigitString>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    pub xi: Option<f64>,
    pub seed: Option<u64>,
}

impl ScanSignal {
    pub fn new(samples: Vec<f64>, r: usize) -> Result<Self> {
        if samples.len() != NUM_BARS * r {
            return Err(Error::GridMismatch {
                signal: samples.len(),
                grid: NUM_BARS * r,
            });
        }
        Ok(ScanSignal {
            samples,
            r,
            provenance: Provenance::default(),
        })
    }

    pub fn grid(&self) -> SampleGrid {
        SampleGrid { r: self.r }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Synthesizes the noiseless measurement of a digit string.
pub fn synthesize_clean(
    digits: &DigitString,
    params: GaussianParams,
    grid: &SampleGrid,
    dict: &Dictionary,
) -> Result<ScanSignal> {
    let map = forward_map(params, grid, dict)?;
    Ok(synthesize_clean_with_map(digits, &map))
}

/// Synthesizes the noiseless measurement using a prebuilt forward map.
pub fn synthesize_clean_with_map(digits: &DigitString, map: &ForwardMap) -> ScanSignal {
    let x = digits_to_x(digits);
    let samples = map.apply_support(&x.support());
    ScanSignal {
        samples,
        r: map.grid().oversampling(),
        provenance: Provenance {
            digits: Some(*digits),
            sigma: Some(map.params().sigma),
            alpha: Some(map.params().alpha),
            ..Provenance::default()
        },
    }
}
