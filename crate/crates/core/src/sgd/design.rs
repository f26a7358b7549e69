use crate::error::{check_len, Error, Result};
use crate::Real;

/// Optimization variable with optional box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignVector<T> {
    pub values: Vec<T>,
    lower: Option<Vec<T>>,
    upper: Option<Vec<T>>,
}

impl<T: Real> DesignVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self {
            values,
            lower: None,
            upper: None,
        }
    }

    /// Bounded design. Either bound may be absent; present bounds must match
    /// the length of `values` and contain it.
    pub fn with_bounds(values: Vec<T>, lower: Option<Vec<T>>, upper: Option<Vec<T>>) -> Result<Self> {
        let n = values.len();
        for b in [&lower, &upper].into_iter().flatten() {
            check_len(n, b.len())?;
        }
        if let (Some(lo), Some(hi)) = (&lower, &upper) {
            if let Some(i) = lo.iter().zip(hi).position(|(l, h)| !(l <= h)) {
                return Err(Error::DomainFault(format!("lower bound exceeds upper bound at {i}")));
            }
        }
        let d = Self { values, lower, upper };
        if let Some(i) = d.violation() {
            return Err(Error::DomainFault(format!("initial value {i} outside its bounds")));
        }
        Ok(d)
    }

    /// Uniform scalar bounds on every component.
    pub fn with_uniform_bounds(values: Vec<T>, lower: T, upper: T) -> Result<Self> {
        let n = values.len();
        Self::with_bounds(values, Some(vec![lower; n]), Some(vec![upper; n]))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lower(&self) -> Option<&[T]> {
        self.lower.as_deref()
    }

    pub fn upper(&self) -> Option<&[T]> {
        self.upper.as_deref()
    }

    pub fn has_bounds(&self) -> bool {
        self.lower.is_some() || self.upper.is_some()
    }

    /// First component lying outside its bounds.
    pub fn violation(&self) -> Option<usize> {
        (0..self.values.len()).find(|&i| {
            let v = self.values[i];
            self.lower.as_ref().is_some_and(|l| v < l[i]) || self.upper.as_ref().is_some_and(|u| v > u[i])
        })
    }

    /// Projects `x` onto the box in place.
    pub fn project(&self, x: &mut [T]) {
        if let Some(lo) = &self.lower {
            for (xi, &l) in x.iter_mut().zip(lo) {
                if *xi < l {
                    *xi = l;
                }
            }
        }
        if let Some(hi) = &self.upper {
            for (xi, &u) in x.iter_mut().zip(hi) {
                if *xi > u {
                    *xi = u;
                }
            }
        }
    }

    /// Same bounds, new values projected onto them.
    pub fn moved_to(&self, mut values: Vec<T>) -> Self {
        self.project(&mut values);
        Self {
            values,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }
}

/// Returns `theta` with each component projected onto `[lower_i, upper_i]`.
pub fn clamp_box<T: Real>(theta: &DesignVector<T>) -> DesignVector<T> {
    theta.moved_to(theta.values.clone())
}
