use crate::error::{Error, Result};
use crate::Real;

/// Symmetric positive-definite matrix in lower band storage.
///
/// Entry `(i, j)` with `i - bw <= j <= i` lives at `data[i * (bw + 1) + (j + bw - i)]`.
#[derive(Debug, Clone)]
pub struct BandedSpd<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
    factored: bool,
}

impl<T: Real> BandedSpd<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![T::zero(); n * (bw + 1)],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `v` to entry `(i, j)`; only the lower triangle is stored, so
    /// callers pass each symmetric pair once.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i},{j}) outside band {}", self.bw);
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            T::zero()
        } else {
            self.data[self.slot(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert!(!self.factored);
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            for j in j0..i {
                let a = row[j + self.bw - i];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += row[self.bw] * x[i];
        }
        y
    }

    /// In-place Cholesky factorization `A = L Lᵀ`.
    pub fn factor(&mut self) -> Result<()> {
        let bw = self.bw;
        let w = bw + 1;
        let tiny = T::epsilon() * T::lit(1e4);
        for i in 0..self.n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = self.data[i * w + (j + bw - i)];
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                for k in k0..j {
                    s -= self.data[ri + k] * self.data[rj + k];
                }
                if i == j {
                    // Pivots that cancel to roundoff level mark an unconstrained mode.
                    if !(s > tiny * self.data[i * w + bw]) || !s.is_finite() {
                        return Err(Error::SingularSystem { pivot: i });
                    }
                    self.data[i * w + bw] = s.sqrt();
                } else {
                    self.data[i * w + (j + bw - i)] = s / self.data[j * w + bw];
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves with a factored matrix.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert!(self.factored, "factor() must be called before solve()");
        let bw = self.bw;
        let w = bw + 1;
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let ri = i * w + bw - i;
            let mut s = y[i];
            for k in j0..i {
                s -= self.data[ri + k] * y[k];
            }
            y[i] = s / self.data[i * w + bw];
        }
        for i in (0..n).rev() {
            y[i] /= self.data[i * w + bw];
            let yi = y[i];
            let j0 = i.saturating_sub(bw);
            let ri = i * w + bw - i;
            for k in j0..i {
                y[k] -= self.data[ri + k] * yi;
            }
        }
        y
    }
}
