use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GibbsState, InferenceError};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::Scalar;

/// Prior on `(μ, ω², L)`. Every regime shares `δ | ω ~ N(0, b₁ D_ω⁻¹)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PriorSpec<T> {
    pub b1: T,
    #[serde(flatten)]
    pub regime: PriorRegime<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "regime", rename_all = "snake_case")]
pub enum PriorRegime<T> {
    /// `μ ~ N(μ₀, b₂I)`, `ω_i² ~ G(b₃, b₄)`, free entries of `L ~ N(0, b₅)`.
    IndependentProper {
        mu0: Vec<T>,
        b2: T,
        b3: T,
        b4: T,
        b5: T,
    },
    /// Flat `μ` and `π(L, D_ω) ∝ Π (ω_i²)^{ψ_i/2-1} exp(-½ tr(L'D_ωL Ψ))`.
    PatternWishart { psi_matrix: Matrix<T>, psi: Vec<T> },
    /// `π(μ, L, ω²) ∝ Π 1/ω_i²`.
    Noninformative,
}

impl<T: Scalar> PriorSpec<T> {
    pub fn independent_proper(k: usize) -> Self {
        Self {
            b1: T::lit(100.0),
            regime: PriorRegime::IndependentProper {
                mu0: vec![T::zero(); k],
                b2: T::lit(1e4),
                b3: T::lit(1e-6),
                b4: T::lit(1e-6),
                b5: T::lit(100.0),
            },
        }
    }

    pub fn noninformative() -> Self {
        Self {
            b1: T::lit(100.0),
            regime: PriorRegime::Noninformative,
        }
    }

    pub fn pattern_wishart(psi_matrix: Matrix<T>, psi: Vec<T>) -> Self {
        Self {
            b1: T::lit(100.0),
            regime: PriorRegime::PatternWishart { psi_matrix, psi },
        }
    }

    pub fn name(&self) -> &'static str {
        match self.regime {
            PriorRegime::IndependentProper { .. } => "independent_proper",
            PriorRegime::PatternWishart { .. } => "pattern_wishart",
            PriorRegime::Noninformative => "noninformative",
        }
    }

    /// Positivity and dimensions of the hyperparameters.
    pub fn validate(&self, k: usize) -> Result<(), InferenceError> {
        let bad = |m: String| Err(InferenceError::InvalidPrior(m));
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.b1) {
            return bad(format!("b1 = {} must be positive", self.b1));
        }
        match &self.regime {
            PriorRegime::IndependentProper {
                mu0,
                b2,
                b3,
                b4,
                b5,
            } => {
                if mu0.len() != k {
                    return bad(format!("mu0 has {} entries, expected {k}", mu0.len()));
                }
                for (name, v) in [("b2", b2), ("b3", b3), ("b4", b4), ("b5", b5)] {
                    if !pos(*v) {
                        return bad(format!("{name} = {v} must be positive"));
                    }
                }
            }
            PriorRegime::PatternWishart { psi_matrix, psi } => {
                if psi.len() != k || psi_matrix.rows() != k || psi_matrix.cols() != k {
                    return bad(format!("Psi must be {k}x{k} and psi of length {k}"));
                }
                if psi.iter().any(|&v| !pos(v)) {
                    return bad("psi entries must be positive".into());
                }
                if !psi_matrix.is_symmetric(T::lit(1e-12)) || psi_matrix.cholesky().is_err() {
                    return bad("Psi must be symmetric positive definite".into());
                }
            }
            PriorRegime::Noninformative => {}
        }
        Ok(())
    }
}

/// Why a prior/sample-size combination cannot yield a proper posterior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProprietyViolation {
    pub message: String,
}

impl fmt::Display for ProprietyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Smallest sample size for which the noninformative posterior is proper.
pub fn min_sample_size(g: &Graph) -> usize {
    g.forward_neighbors().max_size() + 2
}

/// Noninformative: proper iff `n ≥ max|N≺(i)| + 2`. Pattern-Wishart: the prior
/// on `(L, D_ω)` integrates iff `ψ_i > |N≺(i)|` for every vertex.
/// Independent proper priors always pass.
pub fn check_propriety<T: Scalar>(
    prior: &PriorSpec<T>,
    n: usize,
    g: &Graph,
) -> Result<(), ProprietyViolation> {
    let nb = g.forward_neighbors();
    match &prior.regime {
        PriorRegime::IndependentProper { .. } => Ok(()),
        PriorRegime::Noninformative => {
            let need = nb.max_size() + 2;
            if n >= need {
                Ok(())
            } else {
                Err(ProprietyViolation {
                    message: format!(
                        "noninformative prior needs n >= max|N(i)| + 2 = {need} observations, got {n}"
                    ),
                })
            }
        }
        PriorRegime::PatternWishart { psi, .. } => {
            for (i, &p) in psi.iter().enumerate() {
                let size = nb.size(i);
                if !(p > T::of_usize(size)) {
                    return Err(ProprietyViolation {
                        message: format!(
                            "pattern-Wishart prior needs psi_{} > |N(i)| = {size}, got {p}",
                            i + 1
                        ),
                    });
                }
            }
            Ok(())
        }
    }
}

/// Conjugate quantities shared by the full conditionals.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedHyperparams<T> {
    /// Prior precision of each `μ_i`.
    pub v_mu: T,
    pub mu0: Vec<T>,
    /// Gamma shape and rate contributed by the prior on each `ω_i²`.
    pub s_omega: Vec<T>,
    pub r_omega: Vec<T>,
    /// Prior precision for row `i` of `L`, as a full `k × k` matrix. Only the
    /// `N≺(i)` block and the `(N≺(i), i)` column are read.
    pub v_l: Vec<Matrix<T>>,
    pub b1: T,
}

/// Hyperparameters for the current state. The pattern-Wishart rate
/// `½ L_iΨL_i'` and row precision `ω_i²Ψ` depend on the state and must be
/// re-resolved whenever `L` or `ω²` change.
pub fn resolve_hyperparams<T: Scalar>(
    prior: &PriorSpec<T>,
    state: &GibbsState<T>,
) -> ResolvedHyperparams<T> {
    let k = state.mu.len();
    match &prior.regime {
        PriorRegime::IndependentProper {
            mu0,
            b2,
            b3,
            b4,
            b5,
        } => ResolvedHyperparams {
            v_mu: T::one() / *b2,
            mu0: mu0.clone(),
            s_omega: vec![*b3; k],
            r_omega: vec![*b4; k],
            v_l: vec![Matrix::identity(k).scale(T::one() / *b5); k],
            b1: prior.b1,
        },
        PriorRegime::PatternWishart { psi_matrix, psi } => {
            let l = state.l.to_dense();
            let r_omega = (0..k)
                .map(|i| {
                    let row = l.row(i);
                    let prow = psi_matrix.matvec(row);
                    T::lit(0.5) * row.iter().zip(&prow).map(|(&a, &b)| a * b).sum::<T>()
                })
                .collect();
            ResolvedHyperparams {
                v_mu: T::zero(),
                mu0: vec![T::zero(); k],
                s_omega: psi.iter().map(|&p| p * T::lit(0.5)).collect(),
                r_omega,
                v_l: state.omega2.iter().map(|&w| psi_matrix.scale(w)).collect(),
                b1: prior.b1,
            }
        }
        PriorRegime::Noninformative => ResolvedHyperparams {
            v_mu: T::zero(),
            mu0: vec![T::zero(); k],
            s_omega: vec![T::zero(); k],
            r_omega: vec![T::zero(); k],
            v_l: vec![Matrix::zeros(k, k); k],
            b1: prior.b1,
        },
    }
}
