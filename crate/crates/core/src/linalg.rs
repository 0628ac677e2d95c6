//! Dense symmetric positive definite factorization for the Newton systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }
}

/// Dot product with four independent accumulators in a fixed order.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..n {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`, stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `a + shift·I`, reading only the lower triangle.
    pub fn factor(a: &DenseMatrix, shift: f64) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (i * n, j * n);
                let s = dot(&l[ri..ri + j], &l[rj..rj + j]);
                let mut v = a.get(i, j) - s;
                if i == j {
                    v += shift;
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::NotPositiveDefinite(i));
                    }
                    l[ri + i] = sqrt(v);
                } else {
                    l[ri + j] = v / l[rj + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let r = i * n;
            y[i] = (b[i] - dot(&self.l[r..r + i], &y[..i])) / self.l[r + i];
        }
        for i in (0..n).rev() {
            let r = i * n;
            let xi = y[i] / self.l[r + i];
            y[i] = xi;
            for j in 0..i {
                y[j] -= self.l[r + j] * xi;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        let mut a = DenseMatrix::zeros(3);
        let rows = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        let b = [1.0, -2.0, 0.5];
        let x = Cholesky::factor(&a, 0.0).unwrap().solve(&b);
        let ax = a.mul_vec(&x);
        for k in 0..3 {
            assert!((ax[k] - b[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = DenseMatrix::zeros(2);
        a.set(0, 0, 1.0);
        a.set(1, 0, 2.0);
        a.set(0, 1, 2.0);
        a.set(1, 1, 1.0);
        assert_eq!(Cholesky::factor(&a, 0.0).unwrap_err(), Error::NotPositiveDefinite(1));
        assert!(Cholesky::factor(&a, 5.0).is_ok());
    }

    #[test]
    fn laplacian_like_system() {
        let n = 50;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
                a.set(i - 1, i, -1.0);
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = Cholesky::factor(&a, 0.0).unwrap().solve(&b);
        let ax = a.mul_vec(&x);
        for k in 0..n {
            assert!((ax[k] - b[k]).abs() < 1e-10);
        }
    }
}
