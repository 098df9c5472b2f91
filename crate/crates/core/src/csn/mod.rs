//! Closed skew normal distributions `CSN_{n,m}(μ, Σ, Γ, ν, Δ)`.
//!
//! The density is `φ_n(y; μ, Σ) Φ_m(Γ(y-μ); ν, Δ) / Φ_m(0; ν, Δ+ΓΣΓ')`.
//! Only the case where both `Δ` and `Δ+ΓΣΓ'` are diagonal is supported, so that
//! the `Φ_m` terms factor into univariate CDFs. The SGDG family always lands in
//! that case.

pub mod normal;
pub mod truncated;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};
use crate::random::standard_normal_vec;
use crate::Scalar;

pub use normal::{
    normal_log_pdf, std_normal_cdf, std_normal_log_cdf, std_normal_log_pdf, std_normal_pdf,
    std_normal_quantile,
};
pub use truncated::{sample_half_normal, sample_truncated_normal, truncated_normal_log_pdf};

/// Relative off-diagonal tolerance when deciding that a matrix is diagonal.
pub const DIAGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CsnError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} must be diagonal for the factorised normaliser")]
    UnsupportedCovarianceStructure(&'static str),
    #[error("conditioning block is singular")]
    SingularBlock(#[source] LinalgError),
    #[error("split {split} outside 1..{n}")]
    InvalidSplit { split: usize, n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CsnParams<T> {
    pub mu: Vec<T>,
    pub sigma: Matrix<T>,
    /// `m × n` skewness loading.
    pub gamma: Matrix<T>,
    pub nu: Vec<T>,
    pub delta: Matrix<T>,
}

impl<T: Scalar> CsnParams<T> {
    pub fn new(
        mu: Vec<T>,
        sigma: Matrix<T>,
        gamma: Matrix<T>,
        nu: Vec<T>,
        delta: Matrix<T>,
    ) -> Result<Self, CsnError> {
        let p = Self {
            mu,
            sigma,
            gamma,
            nu,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Plain `N_n(μ, Σ)` written as a CSN with a single inert latent.
    pub fn gaussian(mu: Vec<T>, sigma: Matrix<T>) -> Result<Self, CsnError> {
        let n = mu.len();
        Self::new(
            mu,
            sigma,
            Matrix::zeros(1, n),
            vec![T::zero()],
            Matrix::identity(1),
        )
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn m(&self) -> usize {
        self.nu.len()
    }

    fn validate(&self) -> Result<(), CsnError> {
        let (n, m) = (self.n(), self.m());
        let mismatch = |what: &str| Err(CsnError::DimensionMismatch(what.to_string()));
        if n == 0 || m == 0 {
            return mismatch("empty location or latent vector");
        }
        if (self.sigma.rows(), self.sigma.cols()) != (n, n) {
            return mismatch("sigma must be n x n");
        }
        if (self.gamma.rows(), self.gamma.cols()) != (m, n) {
            return mismatch("gamma must be m x n");
        }
        if (self.delta.rows(), self.delta.cols()) != (m, m) {
            return mismatch("delta must be m x m");
        }
        let tol = T::lit(1e-12);
        if !self.sigma.is_symmetric(tol) || !self.delta.is_symmetric(tol) {
            return Err(LinalgError::NotSymmetric.into());
        }
        self.sigma.cholesky()?;
        self.delta.cholesky()?;
        Ok(())
    }

    /// `Δ + ΓΣΓ'`, the covariance of the latent selection vector.
    pub fn selection_cov(&self) -> Matrix<T> {
        self.delta.add(
            &self
                .gamma
                .matmul(&self.sigma)
                .matmul(&self.gamma.transpose()),
        )
    }

    fn diagonal_selection_cov(&self) -> Result<Vec<T>, CsnError> {
        let s = self.selection_cov();
        if !s.is_diagonal(T::lit(DIAGONAL_TOL)) {
            return Err(CsnError::UnsupportedCovarianceStructure(
                "delta + gamma sigma gamma'",
            ));
        }
        Ok(s.diag())
    }

    fn diagonal_delta(&self) -> Result<Vec<T>, CsnError> {
        if !self.delta.is_diagonal(T::lit(DIAGONAL_TOL)) {
            return Err(CsnError::UnsupportedCovarianceStructure("delta"));
        }
        Ok(self.delta.diag())
    }
}

/// Truncated normal `TN(c; μ, Σ)` with diagonal `Σ`, i.e. independent
/// coordinates each truncated below at `c_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TruncNormalSpec<T> {
    pub c: Vec<T>,
    pub mu: Vec<T>,
    pub var: Vec<T>,
}

impl<T: Scalar> TruncNormalSpec<T> {
    pub fn new(c: Vec<T>, mu: Vec<T>, cov: &Matrix<T>) -> Result<Self, CsnError> {
        if c.len() != mu.len() || cov.rows() != mu.len() || !cov.is_square() {
            return Err(CsnError::DimensionMismatch(
                "truncated normal dimensions".into(),
            ));
        }
        if !cov.is_diagonal(T::lit(DIAGONAL_TOL)) {
            return Err(CsnError::UnsupportedCovarianceStructure(
                "truncated normal covariance",
            ));
        }
        let var = cov.diag();
        if let Some(i) = var.iter().position(|v| !(*v > T::zero())) {
            return Err(LinalgError::NonPositiveDiagonal(i).into());
        }
        Ok(Self { c, mu, var })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        (0..self.c.len())
            .map(|i| sample_truncated_normal(self.mu[i], self.var[i], self.c[i], rng))
            .collect()
    }
}

fn mvn_log_pdf<T: Scalar>(y: &[T], mu: &[T], sigma: &Matrix<T>) -> Result<T, CsnError> {
    let ch = sigma.cholesky()?;
    let r: Vec<T> = y.iter().zip(mu).map(|(&a, &b)| a - b).collect();
    let z = ch.solve_lower(&r);
    let quad: T = z.iter().map(|&v| v * v).sum();
    let n = T::of_usize(y.len());
    Ok(-T::lit(0.5) * (quad + ch.log_det() + n * T::lit((2.0 * std::f64::consts::PI).ln())))
}

fn check_point<T: Scalar>(p: &CsnParams<T>, y: &[T]) -> Result<(), CsnError> {
    if y.len() != p.n() {
        return Err(CsnError::DimensionMismatch(format!(
            "point has {} coordinates, expected {}",
            y.len(),
            p.n()
        )));
    }
    Ok(())
}

/// Log of the unnormalised density `φ_n(y; μ, Σ) Φ_m(Γ(y-μ); ν, Δ)`.
/// Needs only `Δ` diagonal.
pub fn csn_log_kernel<T: Scalar>(p: &CsnParams<T>, y: &[T]) -> Result<T, CsnError> {
    check_point(p, y)?;
    let dd = p.diagonal_delta()?;
    let r: Vec<T> = y.iter().zip(&p.mu).map(|(&a, &b)| a - b).collect();
    let g = p.gamma.matvec(&r);
    let mut out = mvn_log_pdf(y, &p.mu, &p.sigma)?;
    for i in 0..p.m() {
        out = out + std_normal_log_cdf((g[i] - p.nu[i]) / dd[i].sqrt());
    }
    Ok(out)
}

/// Log density of the closed skew normal at `y`.
pub fn csn_log_density<T: Scalar>(p: &CsnParams<T>, y: &[T]) -> Result<T, CsnError> {
    let s = p.diagonal_selection_cov()?;
    let mut out = csn_log_kernel(p, y)?;
    for (&nu, &si) in p.nu.iter().zip(&s) {
        out = out - std_normal_log_cdf(-nu / si.sqrt());
    }
    Ok(out)
}

/// Distribution of `Y₂ | Y₁ = y₁` where `Y₁` holds the first `split` coordinates.
pub fn csn_conditional<T: Scalar>(
    p: &CsnParams<T>,
    split: usize,
    y1: &[T],
) -> Result<CsnParams<T>, CsnError> {
    let n = p.n();
    if split == 0 || split >= n {
        return Err(CsnError::InvalidSplit { split, n });
    }
    if y1.len() != split {
        return Err(CsnError::DimensionMismatch(format!(
            "y1 has {} coordinates, expected {split}",
            y1.len()
        )));
    }
    let b1: Vec<usize> = (0..split).collect();
    let b2: Vec<usize> = (split..n).collect();
    let latent: Vec<usize> = (0..p.m()).collect();
    let s11 = p.sigma.submatrix(&b1, &b1);
    let s21 = p.sigma.submatrix(&b2, &b1);
    let s22 = p.sigma.submatrix(&b2, &b2);
    let g1 = p.gamma.submatrix(&latent, &b1);
    let g2 = p.gamma.submatrix(&latent, &b2);

    let ch = s11.cholesky().map_err(CsnError::SingularBlock)?;
    let s11_inv = ch.inverse();
    let reg = s21.matmul(&s11_inv);

    let d1: Vec<T> = y1
        .iter()
        .zip(&p.mu[..split])
        .map(|(&a, &b)| a - b)
        .collect();
    let shift = reg.matvec(&d1);
    let mu: Vec<T> = p.mu[split..]
        .iter()
        .zip(&shift)
        .map(|(&a, &b)| a + b)
        .collect();
    let sigma = symmetrize(&s22.sub(&reg.matmul(&s21.transpose())));
    let gamma_star = g1.add(&g2.matmul(&reg));
    let nu_shift = gamma_star.matvec(&d1);
    let nu: Vec<T> = p.nu.iter().zip(&nu_shift).map(|(&a, &b)| a - b).collect();
    CsnParams::new(mu, sigma, g2, nu, p.delta.clone())
}

fn symmetrize<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        (m[(i, j)] + m[(j, i)]) * T::lit(0.5)
    })
}

/// Draws via `Y = μ + P^{-1/2} V + ΣΓ'S⁻¹U` with `P = Σ⁻¹+Γ'Δ⁻¹Γ`,
/// `S = Δ+ΓΣΓ'`, `V ~ N(0, I)` and `U_i ~ N(0, S_ii)` truncated below at `ν_i`.
///
/// `P^{-1/2}` is taken as `C⁻ᵀ` for the Cholesky factor `P = CCᵀ`; any square
/// root gives the same law because `V` is isotropic.
pub fn sample_csn<T: Scalar, R: Rng + ?Sized>(
    p: &CsnParams<T>,
    rng: &mut R,
    n_draws: usize,
) -> Result<Vec<Vec<T>>, CsnError> {
    let s = p.diagonal_selection_cov()?;
    let sigma_inv = p.sigma.cholesky()?.inverse();
    let delta_inv = p.delta.cholesky()?.inverse();
    let gt = p.gamma.transpose();
    let prec = symmetrize(&sigma_inv.add(&gt.matmul(&delta_inv).matmul(&p.gamma)));
    let c = prec.cholesky()?;
    let s_inv = Matrix::from_diag(&s.iter().map(|&v| T::one() / v).collect::<Vec<_>>());
    let load = p.sigma.matmul(&gt).matmul(&s_inv);
    let tn = TruncNormalSpec {
        c: p.nu.clone(),
        mu: vec![T::zero(); p.m()],
        var: s,
    };
    let mut out = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let v = standard_normal_vec::<T, R>(rng, p.n());
        let u = tn.sample(rng);
        let a = c.solve_upper(&v);
        let b = load.matvec(&u);
        out.push((0..p.n()).map(|i| p.mu[i] + a[i] + b[i]).collect());
    }
    Ok(out)
}
