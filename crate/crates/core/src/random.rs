//! Draws in `f64`, returned in the caller's scalar type.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};

use crate::Scalar;

pub fn standard_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::lit(z)
}

pub fn standard_normal_vec<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

/// Uniform on the open interval `(0, 1)`.
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Gamma draw with shape–rate parameterisation (mean `shape / rate`).
///
/// # Panics
/// If `shape` or `rate` is not strictly positive and finite.
pub fn gamma_shape_rate<T: Scalar, R: Rng + ?Sized>(rng: &mut R, shape: T, rate: T) -> T {
    let g = Gamma::new(shape.as_f64(), 1.0 / rate.as_f64())
        .unwrap_or_else(|e| panic!("invalid gamma(shape={shape}, rate={rate}): {e}"));
    T::lit(g.sample(rng))
}
