use super::conditionals::residuals;
use super::{GibbsState, PriorRegime, PriorSpec};
use crate::linalg::Matrix;
use crate::Scalar;

/// Unnormalised log of `p(x, u | μ, δ, ω², L) π(δ | ω) π(μ, ω², L)`, dropping
/// every term that depends on none of the parameters or latents.
///
/// With `fix_delta_zero` the `δ` prior is omitted (δ is not a parameter then).
/// Negative latents or nonpositive `ω²` give `-∞`.
pub fn log_joint<T: Scalar>(
    state: &GibbsState<T>,
    data: &Matrix<T>,
    prior: &PriorSpec<T>,
    fix_delta_zero: bool,
) -> T {
    let (n, k) = (data.rows(), data.cols());
    if state.omega2.iter().any(|&w| !(w > T::zero())) {
        return T::neg_infinity();
    }
    let half = T::lit(0.5);
    let e = residuals(state, data);
    let mut out = T::zero();
    for r in 0..k {
        let w = state.omega2[r];
        let d = state.delta[r];
        out = out + half * T::of_usize(n) * w.ln();
        for j in 0..n {
            let u = state.u[(j, r)];
            if u < T::zero() {
                return T::neg_infinity();
            }
            let v = e[(j, r)] - d * u;
            out = out - half * w * v * v - half * u * u;
        }
        if !fix_delta_zero {
            out = out + half * w.ln() - w * d * d / (T::lit(2.0) * prior.b1);
        }
    }
    out + log_prior(state, prior)
}

fn log_prior<T: Scalar>(state: &GibbsState<T>, prior: &PriorSpec<T>) -> T {
    let half = T::lit(0.5);
    match &prior.regime {
        PriorRegime::IndependentProper {
            mu0,
            b2,
            b3,
            b4,
            b5,
        } => {
            let mut s = T::zero();
            for (m, m0) in state.mu.iter().zip(mu0) {
                s = s - (*m - *m0) * (*m - *m0) / (T::lit(2.0) * *b2);
            }
            for &w in &state.omega2 {
                s = s + (*b3 - T::one()) * w.ln() - *b4 * w;
            }
            for (_, _, v) in state.l.entries() {
                s = s - v * v / (T::lit(2.0) * *b5);
            }
            s
        }
        PriorRegime::PatternWishart { psi_matrix, psi } => {
            let l = state.l.to_dense();
            let mut s = T::zero();
            for (r, (&w, &p)) in state.omega2.iter().zip(psi).enumerate() {
                let row = l.row(r);
                let q: T = psi_matrix
                    .matvec(row)
                    .iter()
                    .zip(row)
                    .map(|(&a, &b)| a * b)
                    .sum();
                s = s + (half * p - T::one()) * w.ln() - half * w * q;
            }
            s
        }
        PriorRegime::Noninformative => -state.omega2.iter().map(|w| w.ln()).sum::<T>(),
    }
}
