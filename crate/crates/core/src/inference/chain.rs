use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::conditionals::{
    gibbs_update_delta, gibbs_update_l, gibbs_update_mu, gibbs_update_omega2, gibbs_update_u,
};
use super::trace::{Draw, Trace, TraceMeta, SWEEP_ORDER};
use super::{check_propriety, resolve_hyperparams, GibbsState, InferenceError, PriorSpec};
use crate::csn::sample_half_normal;
use crate::graph::{is_decomposable, verify_ordering, EliminationOrdering, Graph};
use crate::linalg::{modified_cholesky, Matrix, PrecisionMatrix};
use crate::sgdg::{reparam_inverse, sgdg_log_density, ReparamParams};
use crate::Scalar;

pub const DEFAULT_THIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Total sweeps, burn-in included.
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Pin `δ = 0`: the Gaussian graphical baseline.
    pub fix_delta_zero: bool,
}

impl ChainConfig {
    /// Burn-in 20% of `iters`, thinning 10.
    pub fn new(iters: usize, seed: u64) -> Self {
        Self {
            iters,
            burn_in: iters / 5,
            thin: DEFAULT_THIN,
            seed,
            fix_delta_zero: false,
        }
    }

    fn validate(&self) -> Result<(), InferenceError> {
        if self.iters == 0 || self.thin == 0 || self.burn_in >= self.iters {
            return Err(InferenceError::InvalidConfig(format!(
                "need iters > burn_in >= 0 and thin >= 1 (iters {}, burn_in {}, thin {})",
                self.iters, self.burn_in, self.thin
            )));
        }
        Ok(())
    }
}

/// One fixed-scan sweep in the order u, δ, μ, ω², L.
pub fn gibbs_sweep<T: Scalar, R: Rng + ?Sized>(
    state: &mut GibbsState<T>,
    data: &Matrix<T>,
    prior: &PriorSpec<T>,
    fix_delta_zero: bool,
    rng: &mut R,
) -> Result<(), InferenceError> {
    gibbs_update_u(state, data, rng);
    let hyper = resolve_hyperparams(prior, state);
    if !fix_delta_zero {
        gibbs_update_delta(state, data, &hyper, rng);
    }
    gibbs_update_mu(state, data, &hyper, rng)?;
    gibbs_update_omega2(state, data, &hyper, fix_delta_zero, rng)?;
    // pattern-Wishart row precisions depend on the fresh ω²
    let hyper = resolve_hyperparams(prior, state);
    gibbs_update_l(state, data, &hyper, rng)
}

/// Starting point: sample mean for `μ`; `(L, ω²)` from the modified Cholesky
/// of the inverse of a ridge-regularised sample covariance, projected onto
/// the graph; `δ = 0`; `u` half-normal.
pub fn initial_state<T: Scalar, R: Rng + ?Sized>(
    data: &Matrix<T>,
    g: &Graph,
    rng: &mut R,
) -> Result<GibbsState<T>, InferenceError> {
    let (n, k) = (data.rows(), data.cols());
    let nn = T::of_usize(n);
    let mu: Vec<T> = (0..k)
        .map(|i| (0..n).map(|j| data[(j, i)]).sum::<T>() / nn)
        .collect();
    let mut cov = Matrix::from_fn(k, k, |a, b| {
        (0..n)
            .map(|j| (data[(j, a)] - mu[a]) * (data[(j, b)] - mu[b]))
            .sum::<T>()
            / nn
    });
    let scale = cov.diag().into_iter().sum::<T>() / T::of_usize(k);
    let ridge = if scale > T::zero() {
        scale * T::lit(1e-3)
    } else {
        T::one()
    };
    for i in 0..k {
        cov[(i, i)] = cov[(i, i)] + ridge;
    }
    let q = cov
        .cholesky()
        .map_err(|e| InferenceError::NumericalFailure(format!("initial covariance: {e}")))?
        .inverse();
    let f = modified_cholesky(&PrecisionMatrix::new(q)?)?;
    let l = f.l().project(g);
    let omega2 = f.d().to_vec();
    let u = Matrix::from_fn(n, k, |_, _| sample_half_normal(rng));
    Ok(GibbsState {
        mu,
        delta: vec![T::zero(); k],
        omega2,
        l,
        u,
    })
}

/// Observed-data log likelihood of the parameters in `state`.
pub fn observed_loglik<T: Scalar>(
    r: &ReparamParams<T>,
    data: &Matrix<T>,
) -> Result<f64, InferenceError> {
    let p = reparam_inverse(r)?;
    Ok((0..data.rows())
        .map(|j| sgdg_log_density(&p, data.row(j)).as_f64())
        .sum())
}

/// Runs one chain. Deterministic in `config.seed`.
pub fn run_chain<T: Scalar>(
    data: &Matrix<T>,
    g: &Graph,
    prior: &PriorSpec<T>,
    config: &ChainConfig,
) -> Result<Trace<T>, InferenceError> {
    let (n, k) = (data.rows(), data.cols());
    if k != g.k() {
        return Err(InferenceError::DimensionMismatch(format!(
            "data has {k} columns, graph has {} vertices",
            g.k()
        )));
    }
    if n == 0 {
        return Err(InferenceError::DimensionMismatch("data has no rows".into()));
    }
    if !is_decomposable(g) {
        return Err(InferenceError::NotDecomposable);
    }
    if !verify_ordering(g, &EliminationOrdering::identity(k)) {
        return Err(InferenceError::NotPerfectOrdering);
    }
    prior.validate(k)?;
    check_propriety(prior, n, g).map_err(|v| InferenceError::ProprietyViolation(v.message))?;
    config.validate()?;
    if (0..n).any(|j| data.row(j).iter().any(|v| !v.is_finite())) {
        return Err(InferenceError::DimensionMismatch(
            "data contains non-finite values".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = initial_state(data, g, &mut rng)?;
    let mut draws = Vec::with_capacity((config.iters - config.burn_in).div_ceil(config.thin));
    for t in 0..config.iters {
        gibbs_sweep(&mut state, data, prior, config.fix_delta_zero, &mut rng)?;
        if t >= config.burn_in && (t - config.burn_in).is_multiple_of(config.thin) {
            let r = state.to_reparam(g);
            let loglik = observed_loglik(&r, data)?;
            if !loglik.is_finite() {
                return Err(InferenceError::NumericalFailure(format!(
                    "non-finite log likelihood at sweep {t}"
                )));
            }
            draws.push(Draw {
                iter: t,
                loglik,
                mu: r.mu,
                delta: r.delta,
                omega2: r.omega2,
                l: r.l,
            });
        }
    }
    Ok(Trace {
        meta: TraceMeta {
            seed: config.seed,
            iters: config.iters,
            burn_in: config.burn_in,
            thin: config.thin,
            fix_delta_zero: config.fix_delta_zero,
            sweep_order: SWEEP_ORDER.iter().map(|s| s.to_string()).collect(),
            prior: prior.clone(),
            graph: g.clone(),
            n,
            k,
            data_digest: None,
            columns: None,
        },
        draws,
    })
}
