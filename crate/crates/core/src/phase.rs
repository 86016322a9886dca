//! Monte-Carlo phase diagrams: success probability of the greedy decoder
//! over a grid of blur estimates and noise levels.

use crate::decoder::{estimate_alpha_with_map, greedy_decode, DecodeOptions};
use crate::error::{Error, Result};
use crate::forward::{forward_map, make_grid, GaussianParams, ScanSignal};
use crate::noise::{absolute_noise, relative_noise, trial_seed};
use crate::symbology::{build_dictionary, digits_to_x, DigitString};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

/// Second grid axis: either relative noise levels nu or absolute noise
/// standard deviations xi.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis2 {
    Nu(Vec<f64>),
    Xi(Vec<f64>),
}

impl Axis2 {
    pub fn values(&self) -> &[f64] {
        match self {
            Axis2::Nu(v) | Axis2::Xi(v) => v,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Axis2::Nu(_) => "nu",
            Axis2::Xi(_) => "xi",
        }
    }
}

/// How the decoder obtains the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaHandling {
    /// Use the true alpha.
    Known,
    /// Least-squares estimate from the middle guard, per trial.
    Estimated,
}

/// Full description of a phase-diagram experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagramSpec {
    pub sigma: f64,
    pub alpha: f64,
    pub r: usize,
    pub sigma_hat: Vec<f64>,
    pub axis2: Axis2,
    pub trials: usize,
    pub seed: u64,
    pub alpha_handling: AlphaHandling,
}

impl PhaseDiagramSpec {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadPhaseSpec("trials must be >= 1".into()));
        }
        for (name, grid) in [("sigma-hat", &self.sigma_hat), ("axis2", &self.axis2.values().to_vec())] {
            if grid.is_empty() {
                return Err(Error::BadPhaseSpec(format!("{name} grid is empty")));
            }
            if grid.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::BadPhaseSpec(format!("{name} grid is not sorted")));
            }
        }
        if self.axis2.values().iter().any(|&v| v < 0.0) {
            return Err(Error::BadPhaseSpec("noise levels must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Per-cell counts, stored axis-1 major: cell (i, j) covers
/// sigma_hat[i] and axis2[j] and lives at index i * axis2.len() + j.
#[derive(Debug, Clone)]
pub struct PhaseDiagramResult {
    pub spec: PhaseDiagramSpec,
    pub successes: Vec<u32>,
    /// Fraction of the 12 digits recovered, averaged per cell (diagnostic
    /// only; success counting is exact-match).
    pub digit_accuracy: Vec<f64>,
    pub wall_time_s: f64,
}

impl PhaseDiagramResult {
    pub fn probability(&self, cell: usize) -> f64 {
        self.successes[cell] as f64 / self.spec.trials as f64
    }
}

fn random_digits(rng: &mut ChaCha12Rng) -> DigitString {
    let mut d = [0u8; 12];
    for v in &mut d {
        *v = (rng.next_u64() % 10) as u8;
    }
    DigitString::new(d).unwrap()
}

/// Worker-count cap from the BARSCAN_THREADS environment variable;
/// 0 or unset means all cores.
fn thread_cap() -> Option<usize> {
    std::env::var("BARSCAN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs the Monte-Carlo experiment.
///
/// Every trial derives a private seed from the master seed and its cell
/// coordinates, so results do not depend on scheduling; cells run in
/// parallel over a rayon pool.
pub fn run_phase_diagram(spec: &PhaseDiagramSpec) -> Result<PhaseDiagramResult> {
    spec.validate()?;
    let start = Instant::now();
    let dict = build_dictionary();
    let grid = make_grid(spec.r)?;

    let true_map = forward_map(GaussianParams::new(spec.sigma, spec.alpha)?, &grid, &dict)?;
    // Unit-amplitude decode maps, one per sigma-hat, shared read-only.
    let unit_maps: Vec<_> = spec
        .sigma_hat
        .iter()
        .map(|&sh| forward_map(GaussianParams::new(sh, 1.0)?, &grid, &dict))
        .collect::<Result<_>>()?;
    let known_maps: Vec<_> = match spec.alpha_handling {
        AlphaHandling::Known => unit_maps
            .iter()
            .map(|m| m.with_alpha(spec.alpha))
            .collect::<Result<_>>()?,
        AlphaHandling::Estimated => Vec::new(),
    };

    let n2 = spec.axis2.values().len();
    let cells: Vec<(usize, usize)> = (0..spec.sigma_hat.len())
        .flat_map(|i| (0..n2).map(move |j| (i, j)))
        .collect();

    let run_cell = |&(i, j): &(usize, usize)| -> Result<(u32, f64)> {
        let level = spec.axis2.values()[j];
        let mut successes = 0u32;
        let mut digit_hits = 0u64;
        for t in 0..spec.trials {
            let s = trial_seed(spec.seed, i, j, t);
            let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(s, 1, 0, 0));
            let digits = random_digits(&mut rng);
            let x = digits_to_x(&digits);
            let mut samples = true_map.apply_support(&x.support());
            let clean = ScanSignal::new(samples.clone(), spec.r)?;
            let noise_seed = trial_seed(s, 2, 0, 0);
            let h = match &spec.axis2 {
                Axis2::Nu(_) => relative_noise(&clean, level, noise_seed)?,
                Axis2::Xi(_) => absolute_noise(clean.len(), level, noise_seed)?,
            };
            for (v, n) in samples.iter_mut().zip(&h) {
                *v += n;
            }
            let noisy = ScanSignal::new(samples, spec.r)?;

            let result = match spec.alpha_handling {
                AlphaHandling::Known => {
                    greedy_decode(&noisy, &known_maps[i], &DecodeOptions::default())?
                }
                AlphaHandling::Estimated => {
                    let alpha_hat = estimate_alpha_with_map(&noisy, &unit_maps[i])?;
                    if !alpha_hat.is_finite() || alpha_hat <= 0.0 {
                        continue; // unusable estimate counts as failure
                    }
                    let map = unit_maps[i].with_alpha(alpha_hat)?;
                    greedy_decode(&noisy, &map, &DecodeOptions::default())?
                }
            };
            if result.digits == digits {
                successes += 1;
            }
            digit_hits += result
                .digits
                .digits()
                .iter()
                .zip(digits.digits())
                .filter(|(a, b)| a == b)
                .count() as u64;
        }
        Ok((successes, digit_hits as f64 / (spec.trials * 12) as f64))
    };

    let outcomes: Vec<Result<(u32, f64)>> = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::BadPhaseSpec(format!("thread pool: {e}")))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };

    let mut successes = Vec::with_capacity(cells.len());
    let mut digit_accuracy = Vec::with_capacity(cells.len());
    for o in outcomes {
        let (s, acc) = o?;
        successes.push(s);
        digit_accuracy.push(acc);
    }

    Ok(PhaseDiagramResult {
        spec: spec.clone(),
        successes,
        digit_accuracy,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Serializes a result to the CSV layout: header
/// `sigma_hat,axis2,successes,trials,probability`, one row per cell,
/// axis-1 major.
pub fn format_csv(result: &PhaseDiagramResult) -> String {
    let mut out = String::from("sigma_hat,axis2,successes,trials,probability\n");
    let axis2 = result.spec.axis2.values();
    for (i, &sh) in result.spec.sigma_hat.iter().enumerate() {
        for (j, &a2) in axis2.iter().enumerate() {
            let cell = i * axis2.len() + j;
            out.push_str(&format!(
                "{sh},{a2},{},{},{:.6}\n",
                result.successes[cell],
                result.spec.trials,
                result.probability(cell)
            ));
        }
    }
    out
}

/// Writes the CSV file.
pub fn write_csv(result: &PhaseDiagramResult, path: &Path) -> Result<()> {
    std::fs::write(path, format_csv(result)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Renders a result as a binary (P5) PGM image: axis 1 runs horizontally,
/// axis 2 downward; probability 1 maps to black (0) and probability 0 to
/// white (255), rounding halves up.
pub fn format_pgm(result: &PhaseDiagramResult) -> Vec<u8> {
    let width = result.spec.sigma_hat.len();
    let height = result.spec.axis2.values().len();
    let mut out = Vec::new();
    write!(out, "P5\n{width} {height}\n255\n").unwrap();
    for j in 0..height {
        for i in 0..width {
            let p = result.probability(i * height + j);
            let shade = (255.0 * (1.0 - p) + 0.5).floor();
            out.push(shade as u8);
        }
    }
    out
}

/// Writes the PGM file.
pub fn write_pgm(result: &PhaseDiagramResult, path: &Path) -> Result<()> {
    std::fs::write(path, format_pgm(result)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parses a `start:stop:step` grid expression (inclusive of `stop` up to
/// a relative tolerance); a bare number yields a single-point grid.
pub fn parse_range(expr: &str) -> Result<Vec<f64>> {
    let bad = || Error::BadRangeExpr(expr.to_string());
    let parts: Vec<&str> = expr.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let v: f64 = single.trim().parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            Ok(vec![v])
        }
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut k = 0u64;
            loop {
                let v = start + k as f64 * step;
                if v > stop + step * 1e-9 {
                    break;
                }
                out.push(v);
                k += 1;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}
