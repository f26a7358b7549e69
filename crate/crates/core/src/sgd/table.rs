use crate::error::{check_len, Result};
use crate::Real;

/// Stored per-realization gradients with an incrementally maintained sum.
#[derive(Debug, Clone)]
pub struct SagGradientTable<T> {
    entries: Vec<Vec<T>>,
    sum: Vec<T>,
    writes: usize,
}

impl<T: Real> SagGradientTable<T> {
    /// `n` zero entries of dimension `dim`.
    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            entries: vec![vec![T::zero(); dim]; n],
            sum: vec![T::zero(); dim],
            writes: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, i: usize) -> &[T] {
        &self.entries[i]
    }

    pub fn sum(&self) -> &[T] {
        &self.sum
    }

    /// Replaces entry `i`, updating the running sum. Every `len()` writes the
    /// sum is rebuilt from scratch to stop rounding drift.
    pub fn replace(&mut self, i: usize, g: Vec<T>) -> Result<()> {
        check_len(self.sum.len(), g.len())?;
        let old = std::mem::replace(&mut self.entries[i], g);
        for ((s, &n), o) in self.sum.iter_mut().zip(&self.entries[i]).zip(old) {
            *s += n - o;
        }
        self.writes += 1;
        if self.writes >= self.entries.len().max(1) {
            self.resync();
        }
        Ok(())
    }

    pub fn resync(&mut self) {
        self.sum = self.fresh_sum();
        self.writes = 0;
    }

    fn fresh_sum(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.sum.len()];
        for e in &self.entries {
            for (a, &b) in s.iter_mut().zip(e) {
                *a += b;
            }
        }
        s
    }

    /// Largest component-wise gap between the running sum and a fresh sum,
    /// relative to `Σ_i |d_i|` in that component (or 1 if smaller).
    pub fn consistency_error(&self) -> T {
        let fresh = self.fresh_sum();
        let mut worst = T::zero();
        for (j, (&f, &s)) in fresh.iter().zip(&self.sum).enumerate() {
            let scale: T = self.entries.iter().map(|e| e[j].abs()).sum();
            worst = worst.max((f - s).abs() / scale.max(T::one()));
        }
        worst
    }
}
