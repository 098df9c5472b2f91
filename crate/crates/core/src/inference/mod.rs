//! Bayesian fitting of SGDG models: priors, propriety gates, the block Gibbs
//! sampler and chain summaries.

pub mod chain;
pub mod conditionals;
pub mod diagnostics;
mod joint;
mod prior;
pub mod summary;
pub mod trace;

use rand::Rng;
use thiserror::Error;

pub use chain::{gibbs_sweep, initial_state, observed_loglik, run_chain, ChainConfig};
pub use conditionals::{
    gibbs_update_delta, gibbs_update_l, gibbs_update_mu, gibbs_update_omega2, gibbs_update_u,
    l_row_conditionals, DeltaConditional, LRowConditional, MuConditional, Omega2Conditional,
    UConditional,
};
pub use diagnostics::{batch_means_se, effective_sample_size};
pub use joint::log_joint;
pub use prior::{
    check_propriety, min_sample_size, resolve_hyperparams, PriorRegime, PriorSpec,
    ProprietyViolation, ResolvedHyperparams,
};
pub use summary::{summarize, write_summary_csv, ParamSummary};
pub use trace::{Draw, Trace, TraceMeta};

use crate::graph::Graph;
use crate::linalg::{LinalgError, Matrix, UnitUpper};
use crate::random::{gamma_shape_rate, standard_normal};
use crate::sgdg::{ReparamParams, SgdgError};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("posterior not guaranteed proper: {0}")]
    ProprietyViolation(String),
    #[error("graph is not decomposable")]
    NotDecomposable,
    #[error(
        "vertex labels are not a perfect elimination ordering; relabel the data and graph first"
    )]
    NotPerfectOrdering,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("trace has no draws")]
    EmptyTrace,
    #[error("prior is improper and cannot be sampled")]
    ImproperPrior,
    #[error("malformed trace: {0}")]
    TraceFormat(String),
    #[error(transparent)]
    Model(#[from] SgdgError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Sampler state: parameters plus the `n × k` half-normal latents.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState<T> {
    pub mu: Vec<T>,
    pub delta: Vec<T>,
    pub omega2: Vec<T>,
    pub l: UnitUpper<T>,
    pub u: Matrix<T>,
}

impl<T: Scalar> GibbsState<T> {
    /// State with the given parameters and latents drawn from `HN(0, I)`.
    pub fn from_reparam<R: Rng + ?Sized>(r: &ReparamParams<T>, n: usize, rng: &mut R) -> Self {
        let k = r.mu.len();
        Self {
            mu: r.mu.clone(),
            delta: r.delta.clone(),
            omega2: r.omega2.clone(),
            l: r.l.project(&r.graph),
            u: Matrix::from_fn(n, k, |_, _| crate::csn::sample_half_normal(rng)),
        }
    }

    pub fn to_reparam(&self, g: &Graph) -> ReparamParams<T> {
        ReparamParams {
            mu: self.mu.clone(),
            delta: self.delta.clone(),
            omega2: self.omega2.clone(),
            l: self.l.clone(),
            graph: g.clone(),
        }
    }
}

/// One draw from an independent proper prior. With `fix_delta_zero`, `δ = 0`.
pub fn sample_prior<T: Scalar, R: Rng + ?Sized>(
    prior: &PriorSpec<T>,
    g: &Graph,
    fix_delta_zero: bool,
    rng: &mut R,
) -> Result<ReparamParams<T>, InferenceError> {
    let k = g.k();
    prior.validate(k)?;
    let PriorRegime::IndependentProper {
        mu0,
        b2,
        b3,
        b4,
        b5,
    } = &prior.regime
    else {
        return Err(InferenceError::ImproperPrior);
    };
    let mu = (0..k)
        .map(|i| mu0[i] + b2.sqrt() * standard_normal::<T, R>(rng))
        .collect();
    let omega2: Vec<T> = (0..k).map(|_| gamma_shape_rate(rng, *b3, *b4)).collect();
    let delta = omega2
        .iter()
        .map(|&w| {
            if fix_delta_zero {
                T::zero()
            } else {
                (prior.b1 / w).sqrt() * standard_normal::<T, R>(rng)
            }
        })
        .collect();
    let mut l = UnitUpper::on_graph(g);
    for i in 0..k {
        let vals: Vec<T> = (0..l.row_cols(i).len())
            .map(|_| b5.sqrt() * standard_normal::<T, R>(rng))
            .collect();
        l.set_row_vals(i, &vals);
    }
    Ok(ReparamParams {
        mu,
        delta,
        omega2,
        l,
        graph: g.clone(),
    })
}
