//! The SGDG model: `L(X - μ)` has independent coordinates
//! `SN(0, κ_r⁻², α_r)`, so that
//!
//! ```text
//! p(x) = 2^k φ_k(x; μ, Q⁻¹) Π_r Φ(α_r κ_r e_r),   e = L(x - μ),   Q = L'D_κL.
//! ```
//!
//! Inference works in the `(δ, ω²)` parametrisation where
//! `L(X - μ) = δ∘U + V/ω` with `U` half-normal and `V` standard normal.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csn::{sample_half_normal, std_normal_log_cdf, CsnParams};
use crate::graph::{verify_ordering, EliminationOrdering, Graph};
use crate::linalg::{
    assemble_precision, CholFactor, LinalgError, Matrix, PrecisionMatrix, UnitUpper,
};
use crate::quadrature::gauss_legendre_on;
use crate::random::standard_normal;
use crate::Scalar;

/// Largest dimension accepted by [`ci_factorization_check`].
pub const CI_CHECK_MAX_K: usize = 4;
/// Quadrature nodes per axis in [`ci_factorization_check`].
pub const CI_CHECK_NODES: usize = 200;
/// Relative Frobenius residual below which a conditional grid counts as rank one.
pub const CI_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SgdgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameter out of domain: {0}")]
    InvalidDomain(String),
    #[error("vertex labels are not a perfect elimination ordering of the graph")]
    NotPerfectOrdering,
    #[error("factor has nonzero entries off the graph")]
    PatternMismatch,
    #[error("dimension {0} too large for quadrature (max {CI_CHECK_MAX_K})")]
    DimensionTooLarge(usize),
    #[error("vertex pair ({0}, {1}) invalid")]
    InvalidPair(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Model parameters in the `(α, κ)` form: location `μ`, the factor
/// `(L, D_κ)` with `D_κ = diag(κ²)`, and skewness `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdgParams<T> {
    mu: Vec<T>,
    factor: CholFactor<T>,
    alpha: Vec<T>,
    graph: Graph,
}

fn check_structure<T: Scalar>(g: &Graph, l: &UnitUpper<T>) -> Result<(), SgdgError> {
    if l.k() != g.k() {
        return Err(SgdgError::DimensionMismatch(format!(
            "factor is {}-dimensional, graph has {} vertices",
            l.k(),
            g.k()
        )));
    }
    if !verify_ordering(g, &EliminationOrdering::identity(g.k())) {
        return Err(SgdgError::NotPerfectOrdering);
    }
    // Zero values on an edge are allowed; nonzeros off the graph are not.
    let tol = T::lit(crate::linalg::PATTERN_ZERO_TOL);
    if l.entries()
        .any(|(i, j, v)| v.abs() > tol && !g.has_edge(i, j))
    {
        return Err(SgdgError::PatternMismatch);
    }
    Ok(())
}

impl<T: Scalar> SgdgParams<T> {
    /// The graph's vertex labels must already be a perfect elimination
    /// ordering; relabel first otherwise.
    pub fn new(
        mu: Vec<T>,
        factor: CholFactor<T>,
        alpha: Vec<T>,
        graph: Graph,
    ) -> Result<Self, SgdgError> {
        let k = graph.k();
        if mu.len() != k || alpha.len() != k {
            return Err(SgdgError::DimensionMismatch(format!(
                "mu has {}, alpha has {} entries, graph has {k} vertices",
                mu.len(),
                alpha.len()
            )));
        }
        check_structure(&graph, factor.l())?;
        if mu.iter().chain(&alpha).any(|v| !v.is_finite()) {
            return Err(SgdgError::InvalidDomain(
                "mu and alpha must be finite".into(),
            ));
        }
        let factor = CholFactor::new(factor.l().project(&graph), factor.d().to_vec())?;
        Ok(Self {
            mu,
            factor,
            alpha,
            graph,
        })
    }

    /// Gaussian member (`α = 0`).
    pub fn gaussian(mu: Vec<T>, factor: CholFactor<T>, graph: Graph) -> Result<Self, SgdgError> {
        let k = graph.k();
        Self::new(mu, factor, vec![T::zero(); k], graph)
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn factor(&self) -> &CholFactor<T> {
        &self.factor
    }

    pub fn l(&self) -> &UnitUpper<T> {
        self.factor.l()
    }

    /// `κ_r²`, the diagonal of `D_κ`.
    pub fn kappa2(&self) -> &[T] {
        self.factor.d()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn precision(&self) -> PrecisionMatrix<T> {
        assemble_precision(&self.factor)
    }

    /// The same law as `CSN_{k,k}(μ, Q⁻¹, D_α L, 0, D_κ⁻¹)`.
    pub fn to_csn(&self) -> Result<CsnParams<T>, SgdgError> {
        let k = self.k();
        let q = self.precision().into_matrix();
        let sigma = q.cholesky()?.inverse();
        let l = self.l().to_dense();
        let gamma = Matrix::from_fn(k, k, |i, j| self.alpha[i] * l[(i, j)]);
        let delta = Matrix::from_diag(
            &self
                .kappa2()
                .iter()
                .map(|&v| T::one() / v)
                .collect::<Vec<_>>(),
        );
        CsnParams::new(self.mu.clone(), sigma, gamma, vec![T::zero(); k], delta)
            .map_err(|e| SgdgError::InvalidDomain(e.to_string()))
    }
}

/// Model parameters in the `(δ, ω²)` form used by the sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReparamParams<T> {
    pub mu: Vec<T>,
    pub delta: Vec<T>,
    pub omega2: Vec<T>,
    pub l: UnitUpper<T>,
    pub graph: Graph,
}

/// `δ_r = α_r / (κ_r √(1+α_r²))`, `ω_r² = κ_r² (1+α_r²)`.
pub fn reparam_forward<T: Scalar>(p: &SgdgParams<T>) -> ReparamParams<T> {
    let (delta, omega2) = p
        .alpha
        .iter()
        .zip(p.kappa2())
        .map(|(&a, &k2)| {
            let s = T::one() + a * a;
            (a / (k2.sqrt() * s.sqrt()), k2 * s)
        })
        .unzip();
    ReparamParams {
        mu: p.mu.clone(),
        delta,
        omega2,
        l: p.l().clone(),
        graph: p.graph.clone(),
    }
}

/// `α_r = δ_r ω_r`, `κ_r² = ω_r² / (1+α_r²)`.
pub fn reparam_inverse<T: Scalar>(r: &ReparamParams<T>) -> Result<SgdgParams<T>, SgdgError> {
    let k = r.mu.len();
    if r.delta.len() != k || r.omega2.len() != k {
        return Err(SgdgError::DimensionMismatch(
            "delta, omega2 and mu lengths differ".into(),
        ));
    }
    if let Some(i) = r
        .omega2
        .iter()
        .position(|&w| !(w > T::zero()) || !w.is_finite())
    {
        return Err(SgdgError::InvalidDomain(format!(
            "omega2[{i}] = {} must be positive",
            r.omega2[i]
        )));
    }
    let (alpha, kappa2): (Vec<T>, Vec<T>) = r
        .delta
        .iter()
        .zip(&r.omega2)
        .map(|(&d, &w2)| {
            let a = d * w2.sqrt();
            (a, w2 / (T::one() + a * a))
        })
        .unzip();
    let factor = CholFactor::new(r.l.clone(), kappa2)?;
    SgdgParams::new(r.mu.clone(), factor, alpha, r.graph.clone())
}

fn ln_sqrt_2_over_pi() -> f64 {
    0.5 * (2.0 / std::f64::consts::PI).ln()
}

/// Log density at `x`.
///
/// # Panics
/// If `x` has the wrong length.
pub fn sgdg_log_density<T: Scalar>(p: &SgdgParams<T>, x: &[T]) -> T {
    assert_eq!(x.len(), p.k(), "point dimension");
    let r: Vec<T> = x.iter().zip(&p.mu).map(|(&a, &b)| a - b).collect();
    let c = T::lit(ln_sqrt_2_over_pi());
    let half = T::lit(0.5);
    let mut out = T::zero();
    for (i, (&k2, &a)) in p.kappa2().iter().zip(&p.alpha).enumerate() {
        let e = p.l().apply_row(i, &r);
        out = out + c + half * k2.ln() - half * k2 * e * e + std_normal_log_cdf(a * k2.sqrt() * e);
    }
    out
}

/// Exact draws through `X = μ + L⁻¹(δ∘U + V/ω)`.
pub fn sample_sgdg<T: Scalar, R: Rng + ?Sized>(
    p: &SgdgParams<T>,
    rng: &mut R,
    n_draws: usize,
) -> Vec<Vec<T>> {
    let r = reparam_forward(p);
    let k = p.k();
    let sd: Vec<T> = r.omega2.iter().map(|&w| T::one() / w.sqrt()).collect();
    (0..n_draws)
        .map(|_| {
            let z: Vec<T> = (0..k)
                .map(|i| {
                    let u: T = sample_half_normal(rng);
                    let v: T = standard_normal(rng);
                    r.delta[i] * u + sd[i] * v
                })
                .collect();
            let y = p.l().solve(&z);
            y.iter().zip(&p.mu).map(|(&a, &b)| a + b).collect()
        })
        .collect()
}

/// `E(X) = μ + L⁻¹ D_κ^{-1/2} d` with `d_r = √(2/π) α_r / √(1+α_r²)`, the
/// mean of each latent skew-normal coordinate.
pub fn mean_vector<T: Scalar>(p: &SgdgParams<T>) -> Vec<T> {
    let b = T::lit((2.0 / std::f64::consts::PI).sqrt());
    let shift: Vec<T> = p
        .alpha
        .iter()
        .zip(p.kappa2())
        .map(|(&a, &k2)| b * a / ((T::one() + a * a).sqrt() * k2.sqrt()))
        .collect();
    let s = p.l().solve(&shift);
    s.iter().zip(&p.mu).map(|(&a, &b)| a + b).collect()
}

/// `Cov(X) = L⁻¹ D_κ^{-1/2} (I - D²) D_κ^{-1/2} L⁻ᵀ`, equivalently the inverse
/// of `L' D_κ^{1/2} (I - D²)⁻¹ D_κ^{1/2} L`, with `D = √(2/π) D_α (I+D_α²)^{-1/2}`.
pub fn covariance_matrix<T: Scalar>(p: &SgdgParams<T>) -> Matrix<T> {
    let k = p.k();
    let two_over_pi = T::lit(2.0 / std::f64::consts::PI);
    let var: Vec<T> = p
        .alpha
        .iter()
        .zip(p.kappa2())
        .map(|(&a, &k2)| (T::one() - two_over_pi * a * a / (T::one() + a * a)) / k2)
        .collect();
    // columns of L⁻¹
    let mut linv = Matrix::zeros(k, k);
    let mut e = vec![T::zero(); k];
    for j in 0..k {
        e[j] = T::one();
        let col = p.l().solve(&e);
        e[j] = T::zero();
        for i in 0..k {
            linv[(i, j)] = col[i];
        }
    }
    Matrix::from_fn(k, k, |i, j| {
        (0..k).map(|r| linv[(i, r)] * var[r] * linv[(j, r)]).sum()
    })
}

/// Inverse of [`covariance_matrix`], assembled directly so its zero pattern is exact.
pub fn covariance_inverse<T: Scalar>(p: &SgdgParams<T>) -> Matrix<T> {
    let two_over_pi = T::lit(2.0 / std::f64::consts::PI);
    let w: Vec<T> = p
        .alpha
        .iter()
        .zip(p.kappa2())
        .map(|(&a, &k2)| k2 / (T::one() - two_over_pi * a * a / (T::one() + a * a)))
        .collect();
    let f = CholFactor::new(p.l().clone(), w).expect("variance weights are positive");
    assemble_precision(&f).into_matrix()
}

/// Empirical test of `X_i ⊥ X_j | X_rest`. At several values of the remaining
/// coordinates, the conditional density of `(X_i, X_j)` is tabulated on a
/// Gauss–Legendre grid and tested for being rank one (product form).
pub fn ci_factorization_check<T: Scalar>(
    p: &SgdgParams<T>,
    i: usize,
    j: usize,
) -> Result<bool, SgdgError> {
    let k = p.k();
    if k > CI_CHECK_MAX_K {
        return Err(SgdgError::DimensionTooLarge(k));
    }
    if i == j || i >= k || j >= k {
        return Err(SgdgError::InvalidPair(i, j));
    }
    let mean: Vec<f64> = mean_vector(p).iter().map(|v| v.as_f64()).collect();
    let cov = covariance_matrix(p);
    let sd: Vec<f64> = cov.diag().iter().map(|v| v.as_f64().sqrt()).collect();
    let rest: Vec<usize> = (0..k).filter(|&v| v != i && v != j).collect();

    let mut points = vec![mean.clone()];
    for sign in [1.0, -1.0] {
        let mut x = mean.clone();
        for (n, &v) in rest.iter().enumerate() {
            let s = if n % 2 == 0 { sign } else { -sign };
            x[v] += s * sd[v];
        }
        points.push(x);
    }
    if rest.is_empty() {
        points.truncate(1);
    }

    for x0 in points {
        if conditional_residual(p, i, j, &x0, &sd) >= CI_CHECK_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative Frobenius distance between the tabulated conditional of
/// `(X_i, X_j)` and the outer product of its marginals.
fn conditional_residual<T: Scalar>(
    p: &SgdgParams<T>,
    i: usize,
    j: usize,
    x0: &[f64],
    sd: &[f64],
) -> f64 {
    // Centre each axis on the Gaussian-part conditional mean given the rest.
    let q = p.precision().into_matrix();
    let centre = |a: usize| -> f64 {
        let s: f64 = (0..p.k())
            .filter(|&v| v != i && v != j)
            .map(|v| q[(a, v)].as_f64() * (x0[v] - p.mu[v].as_f64()))
            .sum();
        x0[a] - s / q[(a, a)].as_f64()
    };
    let axis = |a: usize| {
        let c = centre(a);
        let h = 10.0 * sd[a];
        gauss_legendre_on(CI_CHECK_NODES, c - h, c + h)
    };
    let (xi, wi) = axis(i);
    let (xj, wj) = axis(j);
    let n = CI_CHECK_NODES;
    let mut logp = vec![0.0; n * n];
    let mut x: Vec<T> = x0.iter().map(|&v| T::lit(v)).collect();
    let mut top = f64::NEG_INFINITY;
    for a in 0..n {
        x[i] = T::lit(xi[a]);
        for b in 0..n {
            x[j] = T::lit(xj[b]);
            let v = sgdg_log_density(p, &x).as_f64();
            logp[a * n + b] = v;
            top = top.max(v);
        }
    }
    let mut grid = vec![0.0; n * n];
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            let v = wi[a] * wj[b] * (logp[a * n + b] - top).exp();
            grid[a * n + b] = v;
            total += v;
        }
    }
    grid.iter_mut().for_each(|v| *v /= total);
    let row: Vec<f64> = (0..n)
        .map(|a| grid[a * n..(a + 1) * n].iter().sum())
        .collect();
    let col: Vec<f64> = (0..n)
        .map(|b| (0..n).map(|a| grid[a * n + b]).sum())
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let g = grid[a * n + b];
            num += (g - row[a] * col[b]).powi(2);
            den += g * g;
        }
    }
    (num / den).sqrt()
}

/// On-disk form of [`SgdgParams`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SgdgParamsFile<T> {
    pub graph: Graph,
    pub mu: Vec<T>,
    pub kappa2: Vec<T>,
    pub alpha: Vec<T>,
    pub l: UnitUpper<T>,
}

impl<T: Scalar> From<&SgdgParams<T>> for SgdgParamsFile<T> {
    fn from(p: &SgdgParams<T>) -> Self {
        Self {
            graph: p.graph.clone(),
            mu: p.mu.clone(),
            kappa2: p.kappa2().to_vec(),
            alpha: p.alpha.clone(),
            l: p.l().clone(),
        }
    }
}

impl<T: Scalar> TryFrom<SgdgParamsFile<T>> for SgdgParams<T> {
    type Error = SgdgError;

    fn try_from(f: SgdgParamsFile<T>) -> Result<Self, SgdgError> {
        let factor = CholFactor::new(f.l, f.kappa2)?;
        SgdgParams::new(f.mu, factor, f.alpha, f.graph)
    }
}

impl<T: Scalar> Serialize for SgdgParams<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SgdgParamsFile::from(self).serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for SgdgParams<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = SgdgParamsFile::<T>::deserialize(d)?;
        SgdgParams::try_from(f).map_err(serde::de::Error::custom)
    }
}
