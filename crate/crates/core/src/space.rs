//! Finite-dimensional real inner-product space primitives.
//!
//! [`Vector`] is a thin newtype over `Vec<f64>`, [`LinearOperator`] a dense
//! row-major matrix. Factorizations are delegated to `nalgebra`; everything
//! the iteration touches per step (inner products, mat-vecs) is done here
//! directly on slices.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative stopping threshold between successive Rayleigh quotients.
pub const POWER_ITERATION_TOL: f64 = 1e-12;
/// Hard cap on power iteration sweeps.
pub const POWER_ITERATION_MAX: usize = 10_000;
/// Up to this dimension the power iteration result is cross-checked against
/// a full symmetric eigendecomposition.
pub const DENSE_EIGEN_MAX_DIM: usize = 64;
/// Relative margin used when testing `gamma * L < 1`, so that a step size
/// equal to `1/L` up to rounding is rejected.
pub const GAMMA_MARGIN: f64 = 1e-12;

/// A point of a finite-dimensional real Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Checked constructor: rejects empty vectors and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("vector must have dimension >= 1".into()));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "vector entry {i} is not finite ({})",
                entries[i]
            )));
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Self(vec![value; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Inner product; panics on dimension mismatch (use [`inner`] for a
    /// checked version).
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dist: dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * factor).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Vector) {
        assert_eq!(self.dim(), x.dim(), "axpy: dimension mismatch");
        for (yi, xi) in self.0.iter_mut().zip(&x.0) {
            *yi += a * xi;
        }
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn lerp(&self, other: &Vector, alpha: f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "lerp: dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn to_nalgebra(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub(crate) fn from_nalgebra(v: &DVector<f64>) -> Self {
        Vector(v.iter().copied().collect())
    }
}

impl From<Vec<f64>> for Vector {
    /// Unchecked conversion; prefer [`Vector::new`] for untrusted input.
    fn from(entries: Vec<f64>) -> Self {
        Vector(entries)
    }
}

impl From<&[f64]> for Vector {
    fn from(entries: &[f64]) -> Self {
        Vector(entries.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "add: dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "sub: dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scaled(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scaled(-1.0)
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Dense real matrix, stored row-major. Maps `H1 = R^cols` into `H2 = R^rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LinearOperator {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for LinearOperator {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        LinearOperator::from_rows(rows)
    }
}

impl From<LinearOperator> for Vec<Vec<f64>> {
    fn from(op: LinearOperator) -> Self {
        op.to_rows()
    }
}

impl LinearOperator {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row".into()));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one column".into()));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::InvalidArgument(format!(
                    "matrix row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix from a row-major flat buffer.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "buffer of length {} does not describe a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        Self::from_diagonal(&vec![scale; n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.cols, x.dim())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.cols, x.dim());
        Vector(
            (0..self.rows)
                .map(|i| dot(self.row(i), x.as_slice()))
                .collect(),
        )
    }

    pub fn transpose(&self) -> LinearOperator {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        LinearOperator {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        check_dim(self.cols, rhs.rows)?;
        let mut data = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(LinearOperator {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// `self + scale * rhs`
    pub fn add_scaled(&self, scale: f64, rhs: &LinearOperator) -> Result<LinearOperator> {
        check_dim(self.rows, rhs.rows)?;
        check_dim(self.cols, rhs.cols)?;
        Ok(LinearOperator {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + scale * b)
                .collect(),
        })
    }

    pub fn scaled(&self, factor: f64) -> LinearOperator {
        LinearOperator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol)
            })
    }

    /// `A^T A`
    pub fn gram(&self) -> LinearOperator {
        let mut data = vec![0.0; self.cols * self.cols];
        for i in 0..self.cols {
            for j in i..self.cols {
                let s: f64 = (0..self.rows)
                    .map(|k| self.data[k * self.cols + i] * self.data[k * self.cols + j])
                    .sum();
                data[i * self.cols + j] = s;
                data[j * self.cols + i] = s;
            }
        }
        LinearOperator {
            rows: self.cols,
            cols: self.cols,
            data,
        }
    }

    /// Largest eigenvalue of `A^T A`, i.e. the squared spectral norm.
    pub fn gram_spectral_radius(&self) -> f64 {
        largest_symmetric_eigenvalue(&self.gram())
    }

    /// Operator 2-norm.
    pub fn spectral_norm(&self) -> f64 {
        self.gram_spectral_radius().max(0.0).sqrt()
    }

    /// Smallest eigenvalue of the symmetric part `(A + A^T)/2`.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        assert!(self.is_square(), "symmetric part of a non-square matrix");
        let sym = self.add_scaled(1.0, &self.transpose()).unwrap().scaled(0.5);
        let eig = SymmetricEigen::new(sym.to_nalgebra());
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Per-operator bounds `L_i` on the spectral radius of `A_i^T A_i`, with
/// `L = max L_i` and the admissible step-size interval `(0, 1/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBound {
    pub per_operator: Vec<f64>,
    pub l: f64,
}

impl SpectralBound {
    /// Upper end of the admissible step-size interval; `+inf` when `L = 0`.
    pub fn gamma_upper(&self) -> f64 {
        if self.l > 0.0 {
            1.0 / self.l
        } else {
            f64::INFINITY
        }
    }

    /// The open interval `(0, 1/L)` as a pair.
    pub fn gamma_interval(&self) -> (f64, f64) {
        (0.0, self.gamma_upper())
    }
}

/// Checked inner product.
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    check_dim(x.dim(), y.dim())?;
    Ok(dot(x.as_slice(), y.as_slice()))
}

/// The Hilbert adjoint, which for real matrices is the transpose.
pub fn adjoint(a: &LinearOperator) -> LinearOperator {
    a.transpose()
}

/// Computes `L_i` for every operator by power iteration on `A_i^T A_i`.
pub fn spectral_bound(ops: &[LinearOperator]) -> Result<SpectralBound> {
    if ops.is_empty() {
        return Err(Error::InvalidArgument(
            "spectral bound needs at least one operator".into(),
        ));
    }
    let per_operator: Vec<f64> = ops.iter().map(|a| a.gram_spectral_radius()).collect();
    let l = per_operator.iter().copied().fold(0.0, f64::max);
    Ok(SpectralBound { per_operator, l })
}

/// True iff `0 < gamma < 1/L`.
pub fn gamma_valid(gamma: f64, bound: &SpectralBound) -> bool {
    gamma.is_finite() && gamma > 0.0 && gamma * bound.l < 1.0 - GAMMA_MARGIN
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
///
/// Power iteration from `(1,...,1)/sqrt(n)`; for `n <= 64` the result is
/// cross-checked against a dense eigendecomposition, which wins whenever the
/// two disagree (a start vector orthogonal to the top eigenvector stalls the
/// power method).
pub(crate) fn largest_symmetric_eigenvalue(m: &LinearOperator) -> f64 {
    let n = m.rows();
    let (estimate, converged) = power_iteration(m);
    if n <= DENSE_EIGEN_MAX_DIM {
        let eig = SymmetricEigen::new(m.to_nalgebra());
        let dense = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        let scale = dense.abs().max(f64::MIN_POSITIVE);
        if !converged || (estimate - dense).abs() > 1e-10 * scale {
            return dense;
        }
    }
    estimate
}

fn power_iteration(m: &LinearOperator) -> (f64, bool) {
    let n = m.rows();
    let mut v = Vector::filled(n, 1.0 / (n as f64).sqrt());
    let mut rayleigh = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        let w = m.apply_unchecked(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return (0.0, true);
        }
        v = w.scaled(1.0 / norm);
        if (next - rayleigh).abs() <= POWER_ITERATION_TOL * next.abs().max(1e-300) {
            return (next, true);
        }
        rayleigh = next;
    }
    (rayleigh, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x)
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&v(&[2.0, 3.0]), &v(&[2.0, 3.0])).unwrap(), 13.0);
        assert_eq!(
            inner(&v(&[1.0, 2.0, 3.0]), &v(&[4.0, 5.0, 6.0])).unwrap(),
            32.0
        );
        assert!(matches!(
            inner(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vector_rejects_bad_entries() {
        assert!(Vector::new(vec![]).is_err());
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![0.5]).is_ok());
    }

    #[test]
    fn adjoint_examples() {
        let id = LinearOperator::identity(3);
        assert_eq!(adjoint(&id), id);
        let a = LinearOperator::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let at = LinearOperator::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(adjoint(&a), at);
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = LinearOperator::from_row_major(
            3,
            2,
            (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        )
        .unwrap();
        let at = adjoint(&a);
        for _ in 0..100 {
            let x = Vector::from((0..2).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>());
            let y = Vector::from((0..3).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>());
            let lhs = a.apply(&x).unwrap().dot(&y);
            let rhs = x.dot(&at.apply(&y).unwrap());
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + x.norm() * y.norm()));
        }
    }

    /// Closed-form largest eigenvalue of a symmetric 2x2 matrix.
    fn eig2_max(a: f64, b: f64, d: f64) -> f64 {
        let tr = a + d;
        let det = a * d - b * b;
        tr / 2.0 + ((tr * tr / 4.0) - det).max(0.0).sqrt()
    }

    #[test]
    fn spectral_bound_examples() {
        let b = spectral_bound(&[LinearOperator::identity(2)]).unwrap();
        assert!((b.l - 1.0).abs() < 1e-12);
        assert_eq!(b.gamma_interval(), (0.0, 1.0 / b.l));

        let a = LinearOperator::from_diagonal(&[3.0, 1.0]);
        let g = a.gram();
        let oracle = eig2_max(g.get(0, 0), g.get(0, 1), g.get(1, 1));
        assert_eq!(oracle, 9.0);
        let b = spectral_bound(&[a]).unwrap();
        assert!((b.l - oracle).abs() <= 1e-10 * oracle);
        assert!((b.gamma_upper() - 1.0 / 9.0).abs() < 1e-12);

        let ops = [
            LinearOperator::identity(2),
            LinearOperator::scaled_identity(2, 2.0),
            LinearOperator::scaled_identity(2, 2f64.sqrt()),
        ];
        let b = spectral_bound(&ops).unwrap();
        for (li, expect) in b.per_operator.iter().zip([1.0, 4.0, 2.0]) {
            assert!((li - expect).abs() <= 1e-10 * expect);
        }
        assert!((b.l - 4.0).abs() <= 4e-10);

        assert!(spectral_bound(&[]).is_err());
    }

    #[test]
    fn spectral_bound_stalled_start_vector() {
        // (1,1)/sqrt(2) is orthogonal to the top eigenvector of this gram matrix.
        let a = LinearOperator::from_rows(vec![vec![1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        let b = spectral_bound(&[a]).unwrap();
        assert!((b.l - 2.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_bound_dominates_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let a = LinearOperator::from_row_major(
                r,
                c,
                (0..r * c).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            )
            .unwrap();
            let l = spectral_bound(&[a.clone()]).unwrap().l;
            for _ in 0..100 {
                let x = Vector::from((0..c).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                let x = x.scaled(1.0 / x.norm());
                assert!(a.apply(&x).unwrap().norm_sq() <= l + 1e-8);
            }
        }
    }

    #[test]
    fn zero_operator_gives_unbounded_interval() {
        let b = spectral_bound(&[LinearOperator::zeros(2, 3)]).unwrap();
        assert_eq!(b.l, 0.0);
        assert!(gamma_valid(1e6, &b));
        assert!(!gamma_valid(0.0, &b));
    }

    #[test]
    fn gamma_valid_examples() {
        let four = SpectralBound {
            per_operator: vec![4.0],
            l: 4.0,
        };
        let one = SpectralBound {
            per_operator: vec![1.0],
            l: 1.0,
        };
        assert!(gamma_valid(0.1, &four));
        assert!(!gamma_valid(0.25, &four));
        assert!(!gamma_valid(-0.1, &one));
    }

    #[test]
    fn convex_combination_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = rng.gen_range(1..6);
            let x = Vector::from((0..d).map(|_| rng.gen_range(-4.0..4.0)).collect::<Vec<_>>());
            let y = Vector::from((0..d).map(|_| rng.gen_range(-4.0..4.0)).collect::<Vec<_>>());
            let a: f64 = rng.gen_range(0.0..=1.0);
            let lhs = x.lerp(&y, a).norm_sq();
            let rhs = a * x.norm_sq() + (1.0 - a) * y.norm_sq() - a * (1.0 - a) * x.dist(&y).powi(2);
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn operator_serializes_row_major() {
        let a = LinearOperator::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: LinearOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<LinearOperator>("[[1.0],[2.0,3.0]]").is_err());
    }
}
