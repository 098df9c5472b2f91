//! Marginal likelihood from posterior draws with the Newton–Raftery
//! estimator `p̂₄`, and Bayes factors built on it.
//!
//! With mixing weight `d`, `S` posterior draws with likelihoods `l_s` and
//! `m = dS/(1-d)` imaginary prior draws credited with likelihood `p̂`, the
//! estimate solves
//!
//! ```text
//! p̂ = [m + Σ l_s / (d p̂ + (1-d) l_s)] / [m / p̂ + Σ 1 / (d p̂ + (1-d) l_s)]
//! ```
//!
//! As `d → 0` this is the harmonic mean of the `l_s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::Trace;
use crate::Scalar;

pub const DEFAULT_MIX_WEIGHT: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvidenceError {
    #[error("no log-likelihood values")]
    Empty,
    #[error("mix weight {0} outside (0, 1)")]
    InvalidMixWeight(f64),
    #[error("non-finite log likelihood at draw {0}")]
    NonFinite(usize),
    #[error("fixed point not reached after {iterations} iterations (last relative change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceEstimate {
    pub log_marginal: f64,
    pub n_draws_used: usize,
    pub mix_weight: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Log marginal likelihood by `p̂₄`, iterated in log space from `max l_s`
/// until `|p̂_{t+1}/p̂_t - 1| < tol`.
pub fn estimate_log_marginal(
    loglik: &[f64],
    mix_weight: f64,
    tol: f64,
) -> Result<EvidenceEstimate, EvidenceError> {
    if loglik.is_empty() {
        return Err(EvidenceError::Empty);
    }
    if !(mix_weight > 0.0 && mix_weight < 1.0) {
        return Err(EvidenceError::InvalidMixWeight(mix_weight));
    }
    if let Some(i) = loglik.iter().position(|v| !v.is_finite()) {
        return Err(EvidenceError::NonFinite(i));
    }
    let d = mix_weight;
    let s = loglik.len() as f64;
    let ln_m = (d * s / (1.0 - d)).ln();
    let (ln_d, ln_1md) = (d.ln(), (1.0 - d).ln());

    let mut z = loglik.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut last_change = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let a: Vec<f64> = loglik
            .iter()
            .map(|&l| logaddexp(ln_d + z, ln_1md + l))
            .collect();
        let num = logaddexp(ln_m, log_sum_exp(loglik.iter().zip(&a).map(|(l, a)| l - a)));
        let den = logaddexp(ln_m - z, log_sum_exp(a.iter().map(|a| -a)));
        let next = num - den;
        if !next.is_finite() {
            return Err(EvidenceError::NotConverged {
                iterations: it,
                last_change: f64::NAN,
            });
        }
        last_change = (next - z).exp_m1().abs();
        z = next;
        if last_change < tol {
            return Ok(EvidenceEstimate {
                log_marginal: z,
                n_draws_used: loglik.len(),
                mix_weight,
                converged: true,
                iterations: it,
            });
        }
    }
    Err(EvidenceError::NotConverged {
        iterations: MAX_ITERATIONS,
        last_change,
    })
}

/// Plain harmonic-mean estimate, `-log mean exp(-l_s)`.
pub fn harmonic_mean_log_marginal(loglik: &[f64]) -> f64 {
    let n = loglik.len() as f64;
    -(log_sum_exp(loglik.iter().map(|l| -l)) - n.ln())
}

/// `log BF = log p̂(x | model a) - log p̂(x | model b)` from the per-draw
/// log likelihoods stored in each trace.
pub fn bayes_factor<T: Scalar>(
    a: &Trace<T>,
    b: &Trace<T>,
    mix_weight: f64,
    tol: f64,
) -> Result<BayesFactor, EvidenceError> {
    let ea = estimate_log_marginal(&a.loglik(), mix_weight, tol)?;
    let eb = estimate_log_marginal(&b.loglik(), mix_weight, tol)?;
    Ok(BayesFactor {
        log_bf: ea.log_marginal - eb.log_marginal,
        a: ea,
        b: eb,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactor {
    pub log_bf: f64,
    pub a: EvidenceEstimate,
    pub b: EvidenceEstimate,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_loglik() {
        for d in [0.001, 0.01, 0.5, 0.9] {
            let e = estimate_log_marginal(&[-42.5; 30], d, DEFAULT_TOL).unwrap();
            assert!((e.log_marginal + 42.5).abs() < 1e-12);
            assert!(e.converged);
        }
    }

    #[test]
    fn shift_invariance() {
        let l: Vec<f64> = (0..200)
            .map(|i| -100.0 - (i as f64 * 0.37).sin() * 3.0)
            .collect();
        let a = estimate_log_marginal(&l, 0.05, DEFAULT_TOL)
            .unwrap()
            .log_marginal;
        let shifted: Vec<f64> = l.iter().map(|v| v + 1234.5).collect();
        let b = estimate_log_marginal(&shifted, 0.05, DEFAULT_TOL)
            .unwrap()
            .log_marginal;
        assert!((b - a - 1234.5).abs() < 1e-8);
    }

    #[test]
    fn small_weight_approaches_harmonic_mean() {
        let l = [-3.0, -1.0, -2.5, -0.2, -4.0];
        let hm = harmonic_mean_log_marginal(&l);
        let e = estimate_log_marginal(&l, 1e-9, 1e-13).unwrap();
        assert!(
            (e.log_marginal - hm).abs() < 1e-6,
            "{} vs {hm}",
            e.log_marginal
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            estimate_log_marginal(&[], 0.1, 1e-10),
            Err(EvidenceError::Empty)
        );
        assert!(matches!(
            estimate_log_marginal(&[1.0], 1.0, 1e-10),
            Err(EvidenceError::InvalidMixWeight(_))
        ));
        assert_eq!(
            estimate_log_marginal(&[1.0, f64::NAN], 0.1, 1e-10),
            Err(EvidenceError::NonFinite(1))
        );
    }
}
