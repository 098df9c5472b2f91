//! Samplers for normals truncated below.

use rand::Rng;

use super::normal::{std_normal_cdf, std_normal_log_cdf, std_normal_log_pdf, std_normal_quantile};
use crate::random::{exp1, open01, standard_normal};
use crate::Scalar;

/// Standardised lower bounds above this use exponential-proposal rejection
/// instead of inverting the CDF.
pub const TAIL_SWITCH: f64 = 4.0;

/// Standard normal truncated to `[a, ∞)`.
pub fn sample_std_truncated_below<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a > TAIL_SWITCH {
        // Robert (1995): translated exponential with the optimal rate.
        let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let z = a + exp1(rng) / lambda;
            let log_accept = -0.5 * (z - lambda) * (z - lambda);
            if open01(rng).ln() < log_accept {
                return z;
            }
        }
    }
    // Invert the upper tail: P(Z > z) = Φ(-z), uniform on (0, Φ(-a)).
    let upper_mass = std_normal_cdf(-a);
    let s = open01(rng) * upper_mass;
    let z = -std_normal_quantile(s);
    // Guard against rounding at the boundary.
    z.max(a)
}

/// Draw from `N(mu, var)` restricted to `[lower, ∞)`.
pub fn sample_truncated_normal<T: Scalar, R: Rng + ?Sized>(
    mu: T,
    var: T,
    lower: T,
    rng: &mut R,
) -> T {
    let sd = var.sqrt().as_f64();
    let mu = mu.as_f64();
    let a = (lower.as_f64() - mu) / sd;
    T::lit(mu + sd * sample_std_truncated_below(a, rng))
}

/// `|Z|` with `Z ~ N(0, 1)`.
pub fn sample_half_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    standard_normal::<T, R>(rng).abs()
}

/// Log density of `N(mu, var)` truncated to `[lower, ∞)`, `-∞` below the bound.
pub fn truncated_normal_log_pdf<T: Scalar>(x: T, mu: T, var: T, lower: T) -> T {
    if x < lower {
        return T::neg_infinity();
    }
    let sd = var.sqrt();
    let z = (x - mu) / sd;
    let a = (lower - mu) / sd;
    std_normal_log_pdf(z) - sd.ln() - std_normal_log_cdf(-a)
}
