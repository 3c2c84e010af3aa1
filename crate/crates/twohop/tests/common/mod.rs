//! Independent reference implementations used to cross-check the library:
//! plain triple-loop matrix multiply, a two-sided Jacobi eigensolver on the
//! Gram matrix for singular values, and Simpson quadrature for the Gaussian
//! tail. Deliberately written with different algorithms than the crate.

#![allow(dead_code)]

use twohop::Matrix;

pub fn mat(rows: usize, cols: usize, data: &[f64]) -> Matrix {
    Matrix::from_vec(rows, cols, data.to_vec()).unwrap()
}

/// Textbook triple loop, plain accumulation order.
pub fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols(), b.rows());
    let mut data = vec![0.0; a.rows() * b.cols()];
    for i in 0..a.rows() {
        for t in 0..a.cols() {
            let ait = a.get(i, t);
            for j in 0..b.cols() {
                data[i * b.cols() + j] += ait * b.get(t, j);
            }
        }
    }
    Matrix::from_vec(a.rows(), b.cols(), data).unwrap()
}

/// Singular values via cyclic two-sided Jacobi on the smaller Gram matrix.
pub fn eigen_singular_values(m: &Matrix) -> Vec<f64> {
    let (r, c) = (m.rows(), m.cols());
    let gram: Vec<Vec<f64>> = if c <= r {
        (0..c)
            .map(|i| (0..c).map(|j| (0..r).map(|t| m.get(t, i) * m.get(t, j)).sum()).collect())
            .collect()
    } else {
        (0..r)
            .map(|i| (0..r).map(|j| (0..c).map(|t| m.get(i, t) * m.get(j, t)).sum()).collect())
            .collect()
    };
    let mut sv: Vec<f64> =
        jacobi_eigenvalues(gram).into_iter().map(|lam| lam.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

fn jacobi_eigenvalues(mut s: Vec<Vec<f64>>) -> Vec<f64> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let scale: f64 = s.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += s[p][q] * s[p][q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = s[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = cos * t;
                for k in 0..n {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = cos * skp - sin * skq;
                    s[k][q] = sin * skp + cos * skq;
                }
                for k in 0..n {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = cos * spk - sin * sqk;
                    s[q][k] = sin * spk + cos * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).collect()
}

/// Upper Gaussian tail by Simpson quadrature on the density. Truncation at
/// x + 20 is far below the quadrature error for |x| <= 8.
pub fn simpson_gaussian_q(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - simpson_gaussian_q(-x);
    }
    let lo = x;
    let hi = x + 20.0;
    let panels = 40_000usize;
    let h = (hi - lo) / panels as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(lo) + pdf(hi);
    for i in 1..panels {
        let t = lo + h * i as f64;
        acc += pdf(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}
