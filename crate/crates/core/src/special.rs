//! Standard normal CDF.

use std::f64::consts::FRAC_1_SQRT_2;

/// Cumulative distribution function of the standard normal distribution.
///
/// Evaluated through the complementary error function, which keeps the
/// tails accurate; absolute error is below 1e-14 over the whole real line.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}
