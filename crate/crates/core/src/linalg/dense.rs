use crate::error::{Error, Result};
use crate::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve_dense<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::DimensionFault {
            expected: n,
            found: a.cols,
        });
    }
    if b.rows != n {
        return Err(Error::DimensionFault {
            expected: n,
            found: b.rows,
        });
    }
    let m = b.cols;
    let mut a = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|r| (r, a[(r, k)].abs()))
            .fold((k, T::zero()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == T::zero() {
            return Err(Error::SingularCovariance {
                condition: f64::INFINITY,
            });
        }
        if piv != k {
            for c in 0..n {
                a.data.swap(k * n + c, piv * n + c);
            }
            for c in 0..m {
                x.data.swap(k * m + c, piv * m + c);
            }
        }
        let d = a[(k, k)];
        for r in k + 1..n {
            let f = a[(r, k)] / d;
            if f == T::zero() {
                continue;
            }
            for c in k..n {
                let v = a[(k, c)];
                a[(r, c)] -= f * v;
            }
            for c in 0..m {
                let v = x[(k, c)];
                x[(r, c)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        for c in 0..m {
            let mut s = x[(k, c)];
            for j in k + 1..n {
                s -= a[(k, j)] * x[(j, c)];
            }
            x[(k, c)] = s / a[(k, k)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DenseMatrix::from_fn(3, 3, |r, c| [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]][r][c]);
        let x_true = DenseMatrix::from_fn(3, 2, |r, c| (r * 2 + c) as f64 - 1.5);
        let b = DenseMatrix::from_fn(3, 2, |r, c| (0..3).map(|k| a[(r, k)] * x_true[(k, c)]).sum());
        let x = solve_dense(&a, &b).unwrap();
        for (u, v) in x.data.iter().zip(&x_true.data) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = DenseMatrix::from_fn(2, 2, |r, _| r as f64);
        let b = DenseMatrix::zeros(2, 1);
        assert!(solve_dense(&a, &b).is_err());
    }
}
