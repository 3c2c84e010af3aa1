//! Dense row-major matrices with compensated, order-fixed reductions.
//!
//! Every reduction in this module (dot products, norms, matrix-product
//! entries) accumulates left to right with Kahan compensation. Combined with
//! the counter-based sampler this makes all downstream numbers bit-stable
//! across runs and across thread counts.

use crate::error::{Error, Result};
use crate::mixing::{counter_hash, uniform_open};

/// Default relative tolerance for iterative routines.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default total iteration budget for power iteration.
pub const DEFAULT_MAX_ITER: usize = 10_000;

const JACOBI_MAX_SWEEPS: usize = 64;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// Compensated left-to-right sum of a slice.
pub(crate) fn kahan_sum(xs: &[f64]) -> f64 {
    let mut acc = Kahan::default();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Dense row-major matrix of finite `f64` entries.
///
/// Construction rejects NaN and infinities, so every consumer can assume
/// finite data.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Build from a row-major buffer. Fails on a length mismatch or any
    /// non-finite entry.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape {
                op: "Matrix::from_vec",
                detail: format!("dimensions must be positive, got {rows}x{cols}"),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::from_vec",
                detail: format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            });
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Matrix::from_vec"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build entry by entry from a closure. The closure must return finite
    /// values; non-finite results are rejected.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Row-major view of the backing buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Matrix product with compensated inner products.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                op: "matmul",
                detail: format!("{}x{} * {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            });
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for c in 0..rhs.cols {
                let mut acc = Kahan::default();
                for (k, &a) in row.iter().enumerate() {
                    acc.add(a * rhs.get(k, c));
                }
                data.push(acc.value());
            }
        }
        Matrix::from_vec(self.rows, rhs.cols, data)
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape {
                op: "sub",
                detail: format!("{}x{} - {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Matrix {
        let data = self.data.iter().map(|x| x.abs()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Frobenius norm, compensated and order-fixed.
    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = Kahan::default();
        for &x in &self.data {
            acc.add(x * x);
        }
        acc.value().sqrt()
    }

    /// Entrywise l1 norm (sum of absolute values).
    pub fn entrywise_l1(&self) -> f64 {
        let mut acc = Kahan::default();
        for &x in &self.data {
            acc.add(x.abs());
        }
        acc.value()
    }

    /// Largest singular value via power iteration on the Gram operator.
    ///
    /// Runs restart rounds with distinct deterministic start vectors, never
    /// deflating, until the Rayleigh quotient is stable to `tol` relative or
    /// the total budget `max_iter` is spent. Returns a `NonConvergence`
    /// error on budget exhaustion.
    pub fn operator_norm(&self, tol: f64, max_iter: usize) -> Result<f64> {
        assert!(tol > 0.0, "operator_norm: tol must be positive");
        if self.frobenius_norm() == 0.0 {
            return Ok(0.0);
        }
        // iterate on the smaller Gram side
        let work = if self.rows >= self.cols { self.clone() } else { self.transpose() };
        let n = work.cols;
        let mut spent = 0usize;
        for restart in 0..4u64 {
            let mut v = start_vector(n, restart);
            let mut lambda_prev = -1.0f64;
            while spent < max_iter {
                spent += 1;
                let w = work.apply_gram(&v);
                let lambda = dot(&v, &w);
                let norm = dot(&w, &w).sqrt();
                if norm == 0.0 {
                    // start vector fell in the null space; try the next one
                    break;
                }
                for (vi, wi) in v.iter_mut().zip(&w) {
                    *vi = wi / norm;
                }
                if lambda > 0.0 && (lambda - lambda_prev).abs() <= tol * lambda {
                    return Ok(lambda.max(0.0).sqrt());
                }
                lambda_prev = lambda;
            }
            if spent >= max_iter {
                break;
            }
        }
        Err(Error::NonConvergence { op: "operator_norm", iterations: spent })
    }

    /// `M^T (M v)` without forming the Gram matrix.
    fn apply_gram(&self, v: &[f64]) -> Vec<f64> {
        let mut mv = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = Kahan::default();
            for (x, &vi) in row.iter().zip(v) {
                acc.add(x * vi);
            }
            mv.push(acc.value());
        }
        let mut out = vec![0.0; self.cols];
        for (c, out_c) in out.iter_mut().enumerate() {
            let mut acc = Kahan::default();
            for (r, &mv_r) in mv.iter().enumerate() {
                acc.add(self.get(r, c) * mv_r);
            }
            *out_c = acc.value();
        }
        out
    }

    /// All singular values, descending, via one-sided Jacobi rotations.
    ///
    /// Intended for desk-scale matrices (dimensions up to a few hundred).
    /// The values carry absolute error of order `tol * sigma_max`.
    pub fn singular_values(&self, tol: f64) -> Result<Vec<f64>> {
        assert!(tol > 0.0, "singular_values: tol must be positive");
        // orient tall: rotate columns of an m x n factor with m >= n
        let work = if self.rows >= self.cols { self.clone() } else { self.transpose() };
        let m = work.rows;
        let n = work.cols;
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|c| (0..m).map(|r| work.get(r, c)).collect())
            .collect();
        // Columns this small contribute at most tol * ||A||_F to any
        // singular value, which the error contract already allows. Without
        // the floor, a column annihilated by a rotation leaves a rounding
        // residual perfectly correlated with its partner, and the relative
        // test below keeps rotating it forever.
        let frob2: f64 = cols.iter().map(|c| dot(c, c)).sum();
        let floor = tol * tol * frob2;
        let mut converged = false;
        for _sweep in 0..JACOBI_MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..n.saturating_sub(1) {
                for j in (i + 1)..n {
                    let alpha = dot(&cols[i], &cols[i]);
                    let beta = dot(&cols[j], &cols[j]);
                    let gamma = dot(&cols[i], &cols[j]);
                    if alpha <= floor || beta <= floor {
                        continue;
                    }
                    if gamma.abs() <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let (ci, cj) = two_cols(&mut cols, i, j);
                    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                        let xi = *x;
                        let yj = *y;
                        *x = c * xi - s * yj;
                        *y = s * xi + c * yj;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { op: "singular_values", iterations: JACOBI_MAX_SWEEPS });
        }
        let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
        Ok(sv)
    }

    /// Smallest singular value of the `min(rows, cols)` spectrum.
    pub fn sigma_min(&self, tol: f64) -> Result<f64> {
        let sv = self.singular_values(tol)?;
        Ok(*sv.last().expect("at least one singular value"))
    }
}

/// Compensated dot product.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = Kahan::default();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

/// Deterministic unit-norm start vector for a restart round.
fn start_vector(n: usize, restart: u64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| uniform_open(counter_hash(0x9D5A_17E6, restart, 0, i as u64)) - 0.5)
        .collect();
    let norm = dot(&v, &v).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Two distinct mutable column views.
fn two_cols(cols: &mut [Vec<f64>], i: usize, j: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(i < j);
    let (lo, hi) = cols.split_at_mut(j);
    (&mut lo[i], &mut hi[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::from_vec(rows, cols, data.to_vec()).unwrap()
    }

    #[test]
    fn rejects_nan_and_inf() {
        assert!(Matrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_vec(1, 2, vec![f64::INFINITY, 0.0]).is_err());
        assert!(Matrix::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(Matrix::from_vec(0, 2, vec![]).is_err());
    }

    #[test]
    fn matmul_small_exact() {
        let a = m(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let b = m(2, 1, &[3.0, 5.0]);
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.data(), &[3.0, 10.0]);
    }

    #[test]
    fn matmul_identity() {
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let id = m(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(a.matmul(&id).unwrap(), a);
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = m(2, 3, &[0.0; 6]);
        let b = m(2, 2, &[0.0; 4]);
        assert!(a.matmul(&b).is_err());
    }

    #[test]
    fn matmul_matches_triple_loop() {
        // fixed pseudo-structured entries, compared against the naive product
        let a = Matrix::from_fn(8, 7, |r, c| ((r * 3 + c * 7) % 11) as f64 * 0.25 - 1.0).unwrap();
        let b = Matrix::from_fn(7, 5, |r, c| ((r * 5 + c * 2) % 13) as f64 * 0.5 - 3.0).unwrap();
        let p = a.matmul(&b).unwrap();
        for r in 0..8 {
            for c in 0..5 {
                let mut want = 0.0;
                for k in 0..7 {
                    want += a.get(r, k) * b.get(k, c);
                }
                let got = p.get(r, c);
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "entry ({r},{c}): got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn frobenius_three_four_five() {
        assert_eq!(m(1, 2, &[3.0, 4.0]).frobenius_norm(), 5.0);
        assert_eq!(Matrix::zeros(3, 3).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn l1_sums_absolute_values() {
        assert_eq!(m(2, 2, &[1.0, -2.0, 3.0, -4.0]).entrywise_l1(), 10.0);
    }

    #[test]
    fn operator_norm_diagonal() {
        let a = m(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let s = a.operator_norm(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((s - 3.0).abs() < 1e-9, "s = {s}");
    }

    #[test]
    fn operator_norm_identity_and_zero() {
        let id = m(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((id.operator_norm(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap() - 1.0).abs() < 1e-10);
        let z = Matrix::zeros(4, 2).unwrap();
        assert_eq!(z.operator_norm(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(), 0.0);
    }

    #[test]
    fn singular_values_diagonal() {
        let a = m(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let sv = a.singular_values(DEFAULT_TOL).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-9 && (sv[1] - 1.0).abs() < 1e-9, "{sv:?}");
        assert!((a.sigma_min(DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sigma_min_rank_deficient() {
        let a = m(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(a.sigma_min(DEFAULT_TOL).unwrap() < 1e-8);
    }

    #[test]
    fn sigma_min_uses_short_spectrum() {
        // 2x3 wide: two singular values, both positive here
        let a = m(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        let sv = a.singular_values(DEFAULT_TOL).unwrap();
        assert_eq!(sv.len(), 2);
        assert!((a.sigma_min(DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn transpose_roundtrip() {
        let a = m(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(2, 1), 6.0);
    }

    #[test]
    fn kahan_sum_is_stable() {
        // 1 + 1e-16 repeated: plain summation loses the tail, Kahan keeps it
        let xs = vec![1e-16; 1_000_000];
        let total = kahan_sum(&xs);
        assert!((total - 1e-10).abs() < 1e-24, "total = {total}");
    }
}
