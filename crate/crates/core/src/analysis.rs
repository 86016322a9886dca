//! Diagnostics governing when greedy recovery is guaranteed: the block
//! concentration measure epsilon, the column separation mu, the recovery
//! condition check, the empirical noise ceiling, and the blur-mismatch
//! bound B(sigma, sigma_hat).

use crate::error::{Error, Result};
use crate::forward::ForwardMap;
use crate::special::std_normal_cdf;
use crate::symbology::NUM_BLOCKS;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Blocks carrying digits (0-based): all except the three guard blocks.
fn digit_blocks() -> impl Iterator<Item = usize> {
    (1..7).chain(8..14)
}

/// Concentration and separation diagnostics of a forward map.
#[derive(Debug, Clone)]
pub struct BlockDiagnostics {
    /// Smallest epsilon satisfying both concentration conditions: no column
    /// carries more than epsilon of its L1 mass outside its own row set,
    /// and no row set receives more than epsilon of combined mass from
    /// later blocks.
    pub epsilon: f64,
    /// Minimal full-vector L1 distance between two columns of the same
    /// digit block.
    pub mu: f64,
    /// Same minimum with each distance restricted to the block's row set.
    pub mu_restricted: f64,
    /// Per block: worst L1 mass a column of the block places outside the
    /// block's row set.
    pub out_of_block: [f64; NUM_BLOCKS],
    /// Per block j: worst combined L1 mass that blocks after j can place
    /// inside I_j.
    pub downstream_into: [f64; NUM_BLOCKS],
    /// Per digit block: minimal restricted pairwise column distance
    /// (guard blocks hold infinity).
    pub min_pair_restricted: [f64; NUM_BLOCKS],
}

/// Computes all block diagnostics of a forward map in one pass.
pub fn block_diagnostics(map: &ForwardMap) -> BlockDiagnostics {
    let m = map.num_samples();
    let cols = map.matrix();

    // L1 mass of every column restricted to every row set.
    let row_sets: Vec<(usize, usize)> = (0..NUM_BLOCKS).map(|j| map.row_set(j)).collect();
    let mut out_of_block = [0.0f64; NUM_BLOCKS];
    let mut max_into = [[0.0f64; NUM_BLOCKS]; NUM_BLOCKS]; // [source block][target block]
    for j in 0..NUM_BLOCKS {
        let (c_lo, c_hi) = map.column_block(j);
        let (r_lo, r_hi) = row_sets[j];
        for c in c_lo..c_hi {
            let col = cols.column(c);
            let total: f64 = col.iter().map(|v| v.abs()).sum();
            let own: f64 = (r_lo..r_hi).map(|k| col[k].abs()).sum();
            out_of_block[j] = out_of_block[j].max(total - own);
            for (t, &(t_lo, t_hi)) in row_sets.iter().enumerate() {
                if t == j {
                    continue;
                }
                let into: f64 = (t_lo..t_hi).map(|k| col[k].abs()).sum();
                if into > max_into[j][t] {
                    max_into[j][t] = into;
                }
            }
        }
    }

    // Condition 2: for each target block j, sum over later blocks of their
    // worst single-column mass inside I_j. With nonnegative entries this
    // equals the maximum over all joint column choices.
    let mut downstream_into = [0.0f64; NUM_BLOCKS];
    for j in 0..NUM_BLOCKS - 1 {
        downstream_into[j] = (j + 1..NUM_BLOCKS).map(|src| max_into[src][j]).sum();
    }

    let e1 = out_of_block.iter().cloned().fold(0.0, f64::max);
    let e2 = downstream_into.iter().cloned().fold(0.0, f64::max);
    let epsilon = e1.max(e2);

    let mut mu = f64::INFINITY;
    let mut mu_restricted = f64::INFINITY;
    let mut min_pair_restricted = [f64::INFINITY; NUM_BLOCKS];
    for j in digit_blocks() {
        let (c_lo, c_hi) = map.column_block(j);
        let (r_lo, r_hi) = row_sets[j];
        for a in c_lo..c_hi {
            for b in a + 1..c_hi {
                let (ca, cb) = (cols.column(a), cols.column(b));
                let full: f64 = (0..m).map(|k| (ca[k] - cb[k]).abs()).sum();
                let restricted: f64 = (r_lo..r_hi).map(|k| (ca[k] - cb[k]).abs()).sum();
                mu = mu.min(full);
                mu_restricted = mu_restricted.min(restricted);
                min_pair_restricted[j] = min_pair_restricted[j].min(restricted);
            }
        }
    }

    BlockDiagnostics {
        epsilon,
        mu,
        mu_restricted,
        out_of_block,
        downstream_into,
        min_pair_restricted,
    }
}

/// The concentration measure epsilon of a forward map.
pub fn compute_epsilon(map: &ForwardMap) -> f64 {
    block_diagnostics(map).epsilon
}

/// The minimal intra-block column separation mu (full-vector L1).
pub fn compute_mu(map: &ForwardMap) -> f64 {
    block_diagnostics(map).mu
}

/// Outcome of the recovery-condition check.
#[derive(Debug, Clone)]
pub struct RecoveryCheck {
    /// True iff the strict separation inequality holds in every digit
    /// block for every column pair.
    pub satisfied: bool,
    /// Per digit block (natural order): minimal restricted pairwise
    /// distance minus 2(‖h|_{I_j}‖₁ + 2ε). Positive margins pass.
    pub margins: [f64; 12],
    pub epsilon: f64,
}

/// Checks the sufficient condition for exact greedy recovery: in every
/// digit block, every pair of candidate columns must be separated (on the
/// block's own rows) by more than twice the local noise plus 2 epsilon.
///
/// `noise` is the additive noise vector h; pass an empty slice for the
/// noiseless check.
pub fn check_recovery_condition(map: &ForwardMap, noise: &[f64]) -> Result<RecoveryCheck> {
    let m = map.num_samples();
    if !noise.is_empty() && noise.len() != m {
        return Err(Error::GridMismatch {
            signal: noise.len(),
            grid: m,
        });
    }
    let diag = block_diagnostics(map);
    let mut margins = [0.0f64; 12];
    let mut satisfied = true;
    for (slot, j) in digit_blocks().enumerate() {
        let (lo, hi) = map.row_set(j);
        let h_local: f64 = if noise.is_empty() {
            0.0
        } else {
            noise[lo..hi].iter().map(|v| v.abs()).sum()
        };
        let margin = diag.min_pair_restricted[j] - 2.0 * (h_local + 2.0 * diag.epsilon);
        margins[slot] = margin;
        if margin <= 0.0 {
            satisfied = false;
        }
    }
    Ok(RecoveryCheck {
        satisfied,
        margins,
        epsilon: diag.epsilon,
    })
}

/// Empirical per-block noise ceiling alpha r (e^{-sigma} - (6/5) sigma).
///
/// Negative values mean the empirical sufficient condition is vacuous at
/// this blur level.
pub fn noise_ceiling(sigma: f64, alpha: f64, r: usize) -> f64 {
    alpha * r as f64 * ((-sigma).exp() - 1.2 * sigma)
}

/// The blur-mismatch bound B(sigma, sigma_hat) and its ingredients.
#[derive(Debug, Clone, Copy)]
pub struct SigmaSensitivity {
    pub sigma: f64,
    pub sigma_hat: f64,
    pub sigma_max: f64,
    /// Tail decay base a = e^{-1/(2 sigma_max^2)}.
    pub a: f64,
    /// Worst per-sample kernel difference Delta_1.
    pub delta1: f64,
    /// Crossover index where the tail term drops below Delta_1.
    pub j1: u64,
    /// Per-sample bound B.
    pub b: f64,
}

const J1_CAP: u64 = 10_000;

/// Computes the mismatch bound B(sigma, sigma_hat).
///
/// Delta_1 is the peak pointwise difference of the two blur kernels,
/// located via the crossing point of the two Gaussian densities; the tail
/// term sums the geometric decay beyond the crossover index j1.
pub fn sigma_bound(sigma: f64, sigma_hat: f64) -> Result<SigmaSensitivity> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma));
    }
    if !sigma_hat.is_finite() || sigma_hat <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma_hat));
    }
    let sigma_max = sigma.max(sigma_hat);
    let a = (-1.0 / (2.0 * sigma_max * sigma_max)).exp();

    if sigma == sigma_hat {
        return Ok(SigmaSensitivity {
            sigma,
            sigma_hat,
            sigma_max,
            a,
            delta1: 0.0,
            j1: 1,
            b: 0.0,
        });
    }

    // L has a removable singularity at sigma = sigma_hat; switch to the
    // limit value 1/(2 sigma^2) when the gap is tiny.
    let l = if (sigma - sigma_hat).abs() < 1e-6 {
        1.0 / (2.0 * sigma * sigma)
    } else {
        (sigma.ln() - sigma_hat.ln()) / (sigma * sigma - sigma_hat * sigma_hat)
    };
    let sqrt_l = l.sqrt();
    let delta1 = (std_normal_cdf(std::f64::consts::SQRT_2 * sigma_hat * sqrt_l)
        - std_normal_cdf(std::f64::consts::SQRT_2 * sigma * sqrt_l))
    .abs();

    let delta2 = |j: u64| sigma_max * a.powi(j as i32) / (j as f64 * SQRT_2PI);
    let mut j1 = 1;
    while delta2(j1) > delta1 && j1 < J1_CAP {
        j1 += 1;
    }

    let b = 2.0 * j1 as f64 * delta1
        + 4.0 * sigma_max * a.powi(j1 as i32) / ((1.0 - a) * j1 as f64 * SQRT_2PI);

    Ok(SigmaSensitivity {
        sigma,
        sigma_hat,
        sigma_max,
        a,
        delta1,
        j1,
        b,
    })
}

/// Upper bound 7 r B on the per-block L1 error introduced by decoding
/// with the mismatched blur.
pub fn gterm_bound(sens: &SigmaSensitivity, r: usize) -> f64 {
    7.0 * r as f64 * sens.b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_map, make_grid, GaussianParams};
    use crate::symbology::build_dictionary;

    fn map_at(sigma: f64, alpha: f64, r: usize) -> ForwardMap {
        let dict = build_dictionary();
        let grid = make_grid(r).unwrap();
        forward_map(GaussianParams::new(sigma, alpha).unwrap(), &grid, &dict).unwrap()
    }

    #[test]
    fn indicator_map_is_perfectly_block_diagonal() {
        let map = map_at(0.0, 1.0, 10);
        let diag = block_diagnostics(&map);
        assert_eq!(diag.epsilon, 0.0);
        assert_eq!(diag.mu, 20.0);
        assert_eq!(diag.mu_restricted, 20.0);
    }

    #[test]
    fn epsilon_monotone_in_sigma() {
        let mut prev = -1.0;
        for sigma in [0.0, 0.2, 0.4, 0.6, 0.9, 1.3] {
            let eps = compute_epsilon(&map_at(sigma, 1.0, 5));
            assert!(eps >= prev - 1e-12, "sigma={sigma}: {eps} < {prev}");
            prev = eps;
        }
    }

    #[test]
    fn mu_linear_in_alpha() {
        let m1 = compute_mu(&map_at(0.5, 1.0, 5));
        let m2 = compute_mu(&map_at(0.5, 2.0, 5));
        assert!((m2 - 2.0 * m1).abs() < 1e-9);
    }

    #[test]
    fn restricted_mu_dominated_bound() {
        for sigma in [0.2, 0.5, 0.9] {
            let map = map_at(sigma, 1.0, 5);
            let diag = block_diagnostics(&map);
            assert!(
                diag.mu_restricted >= diag.mu - 2.0 * diag.epsilon - 1e-12,
                "sigma={sigma}"
            );
        }
    }

    #[test]
    fn downstream_collapse_matches_brute_force() {
        // Brute-force the joint maximization over column choices of the
        // three blocks after block 0 on a truncated map, relying only on
        // the definition: max over choices of || sum of restrictions ||_1.
        let map = map_at(0.8, 1.0, 3);
        let cols = map.matrix();
        let (t_lo, t_hi) = map.row_set(0);
        let blocks: Vec<(usize, usize)> = (1..4).map(|j| map.column_block(j)).collect();
        let mut best = 0.0f64;
        for c1 in blocks[0].0..blocks[0].1 {
            for c2 in blocks[1].0..blocks[1].1 {
                for c3 in blocks[2].0..blocks[2].1 {
                    let s: f64 = (t_lo..t_hi)
                        .map(|k| (cols[(k, c1)] + cols[(k, c2)] + cols[(k, c3)]).abs())
                        .sum();
                    best = best.max(s);
                }
            }
        }
        let per_block: f64 = (1..4)
            .map(|j| {
                let (c_lo, c_hi) = map.column_block(j);
                (c_lo..c_hi)
                    .map(|c| {
                        (t_lo..t_hi)
                            .map(|k| cols[(k, c)].abs())
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .sum();
        assert!((best - per_block).abs() < 1e-12);
    }

    #[test]
    fn recovery_check_noiseless_indicator() {
        let map = map_at(0.0, 1.0, 10);
        let check = check_recovery_condition(&map, &[]).unwrap();
        assert!(check.satisfied);
        for &m in &check.margins {
            assert!((m - 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_check_fails_at_large_sigma() {
        // Sweep sigma upward until the condition flips; it must flip
        // before sigma = 2 at r = 10.
        let mut flipped = false;
        for sigma in [0.2, 0.5, 0.8, 1.1, 1.4, 1.7, 2.0] {
            let map = map_at(sigma, 1.0, 10);
            let check = check_recovery_condition(&map, &[]).unwrap();
            if !check.satisfied {
                flipped = true;
                break;
            }
        }
        assert!(flipped);
    }

    #[test]
    fn recovery_check_rejects_bad_noise_length() {
        let map = map_at(0.3, 1.0, 2);
        assert!(check_recovery_condition(&map, &[0.0; 3]).is_err());
    }

    #[test]
    fn noise_ceiling_values() {
        assert!((noise_ceiling(0.0, 1.0, 10) - 10.0).abs() < 1e-12);
        assert!((noise_ceiling(0.425, 1.0, 1) - 0.14377).abs() < 1e-4);
        assert!(noise_ceiling(0.6, 1.0, 1) < 0.0);
    }

    #[test]
    fn sigma_bound_basics() {
        let s = sigma_bound(0.5, 0.5).unwrap();
        assert_eq!(s.b, 0.0);
        assert_eq!(s.j1, 1);

        let s = sigma_bound(0.425, 0.6).unwrap();
        assert!(s.b > 0.0);
        assert!(s.j1 >= 1);
        assert_eq!(s.sigma_max, 0.6);
        assert!((s.a - (-1.0f64 / 0.72).exp()).abs() < 1e-15);

        assert!(sigma_bound(0.0, 0.5).is_err());
        assert!(sigma_bound(0.5, -1.0).is_err());
    }

    #[test]
    fn sigma_bound_symmetric_in_arguments() {
        let ab = sigma_bound(0.425, 0.7).unwrap();
        let ba = sigma_bound(0.7, 0.425).unwrap();
        assert!((ab.b - ba.b).abs() < 1e-14);
    }

    #[test]
    fn sigma_bound_near_coincidence_is_tiny() {
        let s = sigma_bound(0.5, 0.5 + 1e-9).unwrap();
        assert!(s.b.is_finite());
        assert!(s.b < 1e-6, "b={}", s.b);
    }

    #[test]
    fn gterm_bound_scales_with_r() {
        let s = sigma_bound(0.425, 0.4).unwrap();
        assert!((gterm_bound(&s, 10) - 70.0 * s.b).abs() < 1e-12);
        assert_eq!(gterm_bound(&sigma_bound(0.3, 0.3).unwrap(), 10), 0.0);
    }

    #[test]
    fn gterm_bound_dominates_measured_error() {
        // Measured || (G(sigma) - G(sigma_hat)) D x |_{I_j} ||_1 must stay
        // below 7 r B for random codes on a small grid of pairs.
        use crate::symbology::{digits_to_x, DigitString};
        let dict = build_dictionary();
        let grid = make_grid(5).unwrap();
        let r = 5;
        let mut state = 12345u64;
        let mut next_digit = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 10) as u8
        };
        for &(sigma, sigma_hat) in &[(0.3, 0.5), (0.45, 0.45), (0.6, 0.25), (0.9, 1.1)] {
            let p_true = forward_map(GaussianParams::new(sigma, 1.0).unwrap(), &grid, &dict).unwrap();
            let p_hat =
                forward_map(GaussianParams::new(sigma_hat, 1.0).unwrap(), &grid, &dict).unwrap();
            let bound = gterm_bound(&sigma_bound(sigma, sigma_hat).unwrap(), r);
            for _ in 0..10 {
                let mut d = [0u8; 12];
                d.iter_mut().for_each(|v| *v = next_digit());
                let x = digits_to_x(&DigitString::new(d).unwrap());
                let yt = p_true.apply_support(&x.support());
                let yh = p_hat.apply_support(&x.support());
                for j in 0..NUM_BLOCKS {
                    let (lo, hi) = p_true.row_set(j);
                    let err: f64 = (lo..hi).map(|k| (yt[k] - yh[k]).abs()).sum();
                    assert!(err <= bound + 1e-9, "sigma={sigma} hat={sigma_hat} j={j}");
                }
            }
        }
    }
}
