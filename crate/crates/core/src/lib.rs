//! Skew Gaussian decomposable graphical (SGDG) models.
//!
//! A random vector follows an SGDG model when `L(X - μ)` has independent
//! skew-normal coordinates, with `L` unit upper triangular and zero exactly off
//! the edges of a decomposable graph. The precision `Q = L'D_κL` then encodes
//! conditional independence on that graph while each coordinate carries its own
//! skewness.
//!
//! The crate is layered bottom-up:
//!
//! * [`graph`]: chordality, perfect elimination orderings, forward neighbours
//! * [`linalg`]: pattern-constrained modified Cholesky factors
//! * [`csn`]: closed skew normal densities, conditionals and samplers
//! * [`sgdg`]: the model density, sampler, moments and reparametrisation
//! * [`inference`]: priors, propriety gates and the block Gibbs sampler
//! * [`evidence`]: marginal likelihood and Bayes factors from chain output
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common `f64` instantiations.

// `!(x > 0)` is used on purpose so that NaN fails positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csn;
pub mod evidence;
pub mod graph;
pub mod inference;
pub mod linalg;
pub mod quadrature;
pub mod random;
mod scalar;
pub mod sgdg;

pub use graph::{EliminationOrdering, ForwardNeighborSets, Graph, GraphError};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type UnitUpper64 = linalg::UnitUpper<f64>;
pub type CholFactor64 = linalg::CholFactor<f64>;
pub type CholFactor32 = linalg::CholFactor<f32>;
pub type PrecisionMatrix64 = linalg::PrecisionMatrix<f64>;
pub type CsnParams64 = csn::CsnParams<f64>;
pub type SgdgParams64 = sgdg::SgdgParams<f64>;
pub type SgdgParams32 = sgdg::SgdgParams<f32>;
pub type ReparamParams64 = sgdg::ReparamParams<f64>;
pub type GibbsState64 = inference::GibbsState<f64>;
pub type PriorSpec64 = inference::PriorSpec<f64>;
pub type Trace64 = inference::Trace<f64>;
