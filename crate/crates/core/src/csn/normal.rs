//! Univariate standard normal density, distribution function and quantile.

use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::Scalar;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LOG_CDF_ASYMPTOTIC_BELOW: f64 = -8.0;

pub fn std_normal_log_pdf<T: Scalar>(x: T) -> T {
    let x = x.as_f64();
    T::lit(-0.5 * x * x - LN_SQRT_2PI)
}

pub fn std_normal_pdf<T: Scalar>(x: T) -> T {
    std_normal_log_pdf(x).exp()
}

/// `Φ(x) = erfc(-x/√2) / 2`.
pub fn std_normal_cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5 * erfc(-x.as_f64() / std::f64::consts::SQRT_2))
}

/// `log Φ(x)`, finite for all finite `x`. Below `-8` the Mills-ratio series
/// `Φ(x) = φ(x)/|x| · Σ (-1)^n (2n-1)!! / x^{2n}` is summed until its terms
/// stop shrinking.
pub fn std_normal_log_cdf<T: Scalar>(x: T) -> T {
    let x = x.as_f64();
    if x >= LOG_CDF_ASYMPTOTIC_BELOW {
        return T::lit((0.5 * erfc(-x / std::f64::consts::SQRT_2)).ln());
    }
    let inv_x2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..60 {
        let next = -term * (2 * n - 1) as f64 * inv_x2;
        if next.abs() >= term.abs() || next.abs() < 1e-17 {
            break;
        }
        sum += next;
        term = next;
    }
    T::lit(-0.5 * x * x - LN_SQRT_2PI - (-x).ln() + sum.ln())
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`, polished with one Newton step against [`std_normal_cdf`].
pub fn std_normal_quantile<T: Scalar>(p: T) -> T {
    let p = p.as_f64();
    let x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() {
        return T::lit(x);
    }
    let f = 0.5 * erfc(-x / std::f64::consts::SQRT_2) - p;
    let d = (-0.5 * x * x - LN_SQRT_2PI).exp();
    T::lit(if d > 0.0 { x - f / d } else { x })
}

/// Log density of `N(mean, var)` at `x`.
pub fn normal_log_pdf<T: Scalar>(x: T, mean: T, var: T) -> T {
    let z = (x - mean) / var.sqrt();
    std_normal_log_pdf(z) - T::lit(0.5) * var.ln()
}
