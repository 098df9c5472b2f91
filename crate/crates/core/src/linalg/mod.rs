//! Modified Cholesky factors `Q = Lᵀ D L` with unit upper-triangular `L`
//! whose off-diagonal support follows a graph, plus small dense kernels.
//!
//! Orientation: `L_ij` may be nonzero only for `i < j`. Row `i` of `L`
//! therefore couples vertex `i` to its forward neighbours `N≺(i)`. Under a
//! perfect elimination ordering the zero pattern of `Q` above the diagonal is
//! reproduced exactly in `L`.

mod dense;

pub use dense::{Cholesky, Matrix};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::Scalar;

/// Entries below this magnitude count as structural zeros when comparing
/// a factor against a graph.
pub const PATTERN_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry ({0}, {1}) is outside the factor's sparsity pattern")]
    OutsidePattern(usize, usize),
    #[error("diagonal entry {0} must be positive")]
    NonPositiveDiagonal(usize),
}

/// Unit upper-triangular matrix stored as sparse rows. Each row keeps the
/// columns it is allowed to use (strictly greater than the row index) in
/// increasing order; entries outside those slots are zero by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitUpper<T> {
    k: usize,
    cols: Vec<Vec<usize>>,
    vals: Vec<Vec<T>>,
}

impl<T: Scalar> UnitUpper<T> {
    pub fn identity(k: usize) -> Self {
        Self {
            k,
            cols: vec![Vec::new(); k],
            vals: vec![Vec::new(); k],
        }
    }

    /// Zero-valued factor whose free slots are the forward edges of `g`.
    pub fn on_graph(g: &Graph) -> Self {
        let nb = g.forward_neighbors();
        let cols: Vec<Vec<usize>> = nb.iter().map(<[usize]>::to_vec).collect();
        let vals = cols.iter().map(|c| vec![T::zero(); c.len()]).collect();
        Self {
            k: g.k(),
            cols,
            vals,
        }
    }

    /// Full upper triangle of a dense matrix, every `i < j` slot kept.
    pub fn from_dense_upper(m: &Matrix<T>) -> Self {
        let k = m.rows();
        let cols: Vec<Vec<usize>> = (0..k).map(|i| (i + 1..k).collect()).collect();
        let vals = (0..k)
            .map(|i| (i + 1..k).map(|j| m[(i, j)]).collect())
            .collect();
        Self { k, cols, vals }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Columns of the free slots in row `i`.
    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.cols[i]
    }

    pub fn row_vals(&self, i: usize) -> &[T] {
        &self.vals[i]
    }

    pub fn set_row_vals(&mut self, i: usize, vals: &[T]) {
        assert_eq!(
            vals.len(),
            self.cols[i].len(),
            "row {i} has {} free slots",
            self.cols[i].len()
        );
        self.vals[i].copy_from_slice(vals);
    }

    pub fn num_free(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::one();
        }
        match self.cols[i].binary_search(&j) {
            Ok(p) => self.vals[i][p],
            Err(_) => T::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) -> Result<(), LinalgError> {
        match self.cols.get(i).map(|c| c.binary_search(&j)) {
            Some(Ok(p)) => {
                self.vals[i][p] = v;
                Ok(())
            }
            _ => Err(LinalgError::OutsidePattern(i, j)),
        }
    }

    /// Free slots as `(i, j, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.k).flat_map(move |i| {
            self.cols[i]
                .iter()
                .zip(&self.vals[i])
                .map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `(L x)_i = x_i + Σ_j L_ij x_j`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        (0..self.k).map(|i| self.apply_row(i, x)).collect()
    }

    #[inline]
    pub fn apply_row(&self, i: usize, x: &[T]) -> T {
        self.cols[i]
            .iter()
            .zip(&self.vals[i])
            .fold(x[i], |acc, (&j, &v)| acc + v * x[j])
    }

    /// `Lᵀ y`.
    pub fn apply_transpose(&self, y: &[T]) -> Vec<T> {
        let mut out = y.to_vec();
        for ((cols, vals), &yi) in self.cols.iter().zip(&self.vals).zip(y) {
            for (&j, &v) in cols.iter().zip(vals) {
                out[j] = out[j] + v * yi;
            }
        }
        out
    }

    /// Solves `L x = b` by back substitution.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        for i in (0..self.k).rev() {
            let mut s = b[i];
            for (&j, &v) in self.cols[i].iter().zip(&self.vals[i]) {
                s = s - v * x[j];
            }
            x[i] = s;
        }
        x
    }

    /// Solves `Lᵀ y = c` by forward substitution.
    pub fn solve_transpose(&self, c: &[T]) -> Vec<T> {
        let mut y = c.to_vec();
        for i in 0..self.k {
            let yi = y[i];
            for (&j, &v) in self.cols[i].iter().zip(&self.vals[i]) {
                y[j] = y[j] - v * yi;
            }
        }
        y
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::identity(self.k);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    /// Copy restricted to the forward edges of `g`; values in other slots are dropped.
    pub fn project(&self, g: &Graph) -> Self {
        let mut out = Self::on_graph(g);
        for (i, j, v) in self.entries() {
            let _ = out.set(i, j, v);
        }
        out
    }

    /// Every free slot is a forward edge of `g` (values are not inspected).
    pub fn pattern_within(&self, g: &Graph) -> bool {
        self.k == g.k() && self.entries().all(|(i, j, _)| g.has_edge(i, j))
    }
}

/// The pair `(L, D)` of a modified Cholesky decomposition `Q = Lᵀ diag(D) L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor<T> {
    l: UnitUpper<T>,
    d: Vec<T>,
}

impl<T: Scalar> CholFactor<T> {
    pub fn new(l: UnitUpper<T>, d: Vec<T>) -> Result<Self, LinalgError> {
        if d.len() != l.k() {
            return Err(LinalgError::DimensionMismatch {
                expected: l.k(),
                got: d.len(),
            });
        }
        if let Some(i) = d.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(LinalgError::NonPositiveDiagonal(i));
        }
        Ok(Self { l, d })
    }

    pub fn l(&self) -> &UnitUpper<T> {
        &self.l
    }

    pub fn d(&self) -> &[T] {
        &self.d
    }

    pub fn k(&self) -> usize {
        self.d.len()
    }

    pub fn into_parts(self) -> (UnitUpper<T>, Vec<T>) {
        (self.l, self.d)
    }

    /// `det Q = Π D_i`, returned on the log scale.
    pub fn log_det(&self) -> T {
        self.d.iter().map(|v| v.ln()).sum()
    }
}

/// Symmetric positive definite matrix used as a precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionMatrix<T>(Matrix<T>);

impl<T: Scalar> PrecisionMatrix<T> {
    /// Checks shape and symmetry. Positive definiteness surfaces later, from
    /// the factorisation.
    pub fn new(m: Matrix<T>) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare(m.rows(), m.cols()));
        }
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
        if !m.is_symmetric(tol) {
            return Err(LinalgError::NotSymmetric);
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    /// Membership in `P_G`: zero wherever `g` has no edge.
    pub fn respects(&self, g: &Graph) -> bool {
        let q = &self.0;
        (0..self.k())
            .all(|i| (0..self.k()).all(|j| i == j || g.has_edge(i, j) || q[(i, j)] == T::zero()))
    }
}

/// Unique `Q = Lᵀ diag(D) L` with `L` unit upper triangular. Every `i < j`
/// slot of the returned `L` is populated, so the result can be checked against
/// any graph with [`verify_pattern`].
pub fn modified_cholesky<T: Scalar>(q: &PrecisionMatrix<T>) -> Result<CholFactor<T>, LinalgError> {
    let a = q.matrix();
    let k = a.rows();
    // m holds Lᵀ (unit lower); row-oriented LDLᵀ elimination.
    let mut m = Matrix::<T>::identity(k);
    let mut d = vec![T::zero(); k];
    for j in 0..k {
        let mut dj = a[(j, j)];
        for r in 0..j {
            dj = dj - m[(j, r)] * m[(j, r)] * d[r];
        }
        if !(dj > T::zero()) {
            return Err(LinalgError::NotPositiveDefinite {
                index: j,
                pivot: dj.as_f64(),
            });
        }
        d[j] = dj;
        for i in j + 1..k {
            let mut s = a[(i, j)];
            for r in 0..j {
                s = s - m[(i, r)] * m[(j, r)] * d[r];
            }
            m[(i, j)] = s / dj;
        }
    }
    let l = UnitUpper::from_dense_upper(&m.transpose());
    CholFactor::new(l, d)
}

/// `Lᵀ diag(D) L`, accumulated row by row over the sparse rows of `L`.
pub fn assemble_precision<T: Scalar>(f: &CholFactor<T>) -> PrecisionMatrix<T> {
    assemble_from_parts(f.l(), f.d())
}

pub(crate) fn assemble_from_parts<T: Scalar>(l: &UnitUpper<T>, d: &[T]) -> PrecisionMatrix<T> {
    let k = l.k();
    let mut q = Matrix::zeros(k, k);
    for (r, &dr) in d.iter().enumerate() {
        let mut idx = Vec::with_capacity(l.row_cols(r).len() + 1);
        idx.push((r, T::one()));
        idx.extend(
            l.row_cols(r)
                .iter()
                .copied()
                .zip(l.row_vals(r).iter().copied()),
        );
        for (a, &(ca, va)) in idx.iter().enumerate() {
            for &(cb, vb) in &idx[a..] {
                let (lo, hi) = if ca <= cb { (ca, cb) } else { (cb, ca) };
                q[(lo, hi)] = q[(lo, hi)] + dr * va * vb;
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            q[(j, i)] = q[(i, j)];
        }
    }
    PrecisionMatrix(q)
}

/// Solves `L x = b` using only the stored entries of `L`.
pub fn solve_unit_triangular<T: Scalar>(f: &CholFactor<T>, b: &[T]) -> Vec<T> {
    f.l().solve(b)
}

/// True iff `|L_ij| > 1e-12` exactly on the forward edges of `g`.
pub fn verify_pattern<T: Scalar>(f: &CholFactor<T>, g: &Graph) -> bool {
    if f.k() != g.k() {
        return false;
    }
    let tol = T::lit(PATTERN_ZERO_TOL);
    let k = f.k();
    for i in 0..k {
        for j in i + 1..k {
            let nonzero = f.l().get(i, j).abs() > tol;
            if nonzero != g.has_edge(i, j) {
                return false;
            }
        }
    }
    true
}

// Serialized form of L for traces and parameter files: dense row-major.
impl<T: Scalar> Serialize for UnitUpper<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_dense().serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for UnitUpper<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = Matrix::<T>::deserialize(deserializer)?;
        if !m.is_square() {
            return Err(serde::de::Error::custom("L must be square"));
        }
        let k = m.rows();
        for i in 0..k {
            if m[(i, i)] != T::one() || (0..i).any(|j| m[(i, j)] != T::zero()) {
                return Err(serde::de::Error::custom("L must be unit upper triangular"));
            }
        }
        // Keep only nonzero slots; callers re-project onto their graph.
        let cols: Vec<Vec<usize>> = (0..k)
            .map(|i| (i + 1..k).filter(|&j| m[(i, j)] != T::zero()).collect())
            .collect();
        let vals = cols
            .iter()
            .enumerate()
            .map(|(i, c)| c.iter().map(|&j| m[(i, j)]).collect())
            .collect();
        Ok(UnitUpper { k, cols, vals })
    }
}
