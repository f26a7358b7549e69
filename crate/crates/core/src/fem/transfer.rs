//! Two-grid transfer between a fine mesh and one with elements twice as wide.

use crate::error::{check_len, Error, Result};
use crate::Real;

/// Interpolation actually used by [`prolong`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    CubicSpline,
    /// Coarse grid too small for a cubic spline in some direction.
    Bilinear,
}

/// Coarse values as the mean of their four fine children. `nelx`, `nely`
/// are the fine dimensions; element storage is column-major.
pub fn restrict<T: Real>(fine: &[T], nelx: usize, nely: usize) -> Result<Vec<T>> {
    check_len(nelx * nely, fine.len())?;
    if nelx % 2 != 0 || nely % 2 != 0 || nelx == 0 || nely == 0 {
        return Err(Error::DimensionFault {
            expected: 2 * (nelx / 2).max(1),
            found: nelx,
        });
    }
    let (cx, cy) = (nelx / 2, nely / 2);
    let q = T::lit(0.25);
    let mut out = Vec::with_capacity(cx * cy);
    for ex in 0..cx {
        for ey in 0..cy {
            let at = |i: usize, j: usize| fine[(2 * ex + i) * nely + 2 * ey + j];
            out.push(q * (at(0, 0) + at(1, 0) + at(0, 1) + at(1, 1)));
        }
    }
    Ok(out)
}

/// Coarse centroid values interpolated to fine centroids with a tensor
/// natural cubic spline (bilinear when a coarse dimension is below 4).
/// `nelx`, `nely` are the coarse dimensions.
pub fn prolong<T: Real>(coarse: &[T], nelx: usize, nely: usize) -> Result<(Vec<T>, Interpolation)> {
    check_len(nelx * nely, coarse.len())?;
    if nelx == 0 || nely == 0 {
        return Err(Error::DimensionFault { expected: 1, found: 0 });
    }
    let kind = if nelx >= 4 && nely >= 4 {
        Interpolation::CubicSpline
    } else {
        Interpolation::Bilinear
    };
    let (fx, fy) = (2 * nelx, 2 * nely);
    // Fine centroid k sits at coarse index coordinate k/2 − 1/4.
    let at = |k: usize| T::from_count(k) * T::lit(0.5) - T::lit(0.25);
    let xs: Vec<T> = (0..fx).map(at).collect();
    let ys: Vec<T> = (0..fy).map(at).collect();
    let interp = |vals: &[T], pts: &[T]| match kind {
        Interpolation::CubicSpline => NaturalSpline::new(vals).eval_many(pts),
        Interpolation::Bilinear => linear_many(vals, pts),
    };

    // Along x for every coarse row, then along y for every fine column.
    let mut rows = vec![T::zero(); nely * fx];
    let mut line = vec![T::zero(); nelx];
    for ey in 0..nely {
        for ex in 0..nelx {
            line[ex] = coarse[ex * nely + ey];
        }
        rows[ey * fx..(ey + 1) * fx].copy_from_slice(&interp(&line, &xs));
    }
    let mut out = vec![T::zero(); fx * fy];
    let mut col = vec![T::zero(); nely];
    for i in 0..fx {
        for ey in 0..nely {
            col[ey] = rows[ey * fx + i];
        }
        out[i * fy..(i + 1) * fy].copy_from_slice(&interp(&col, &ys));
    }
    Ok((out, kind))
}

/// Piecewise-linear interpolation on unit knots `0..n`, extended linearly.
fn linear_many<T: Real>(v: &[T], pts: &[T]) -> Vec<T> {
    let n = v.len();
    if n == 1 {
        return vec![v[0]; pts.len()];
    }
    pts.iter()
        .map(|&s| {
            let i = s.floor().to_isize().unwrap_or(0).clamp(0, n as isize - 2) as usize;
            let t = s - T::from_count(i);
            v[i] + t * (v[i + 1] - v[i])
        })
        .collect()
}

/// Natural cubic spline on unit-spaced knots `0..n`. Outside the knots the
/// end cubic pieces are extended.
struct NaturalSpline<'a, T> {
    y: &'a [T],
    m: Vec<T>,
}

impl<'a, T: Real> NaturalSpline<'a, T> {
    fn new(y: &'a [T]) -> Self {
        let n = y.len();
        let mut m = vec![T::zero(); n];
        if n > 2 {
            // Thomas algorithm for M_{i-1} + 4M_i + M_{i+1} = 6(y_{i+1} − 2y_i + y_{i-1}).
            let k = n - 2;
            let mut c = vec![T::zero(); k];
            let mut d = vec![T::zero(); k];
            let (four, six) = (T::lit(4.0), T::lit(6.0));
            for i in 0..k {
                let rhs = six * (y[i + 2] - T::lit(2.0) * y[i + 1] + y[i]);
                let denom = four - if i > 0 { c[i - 1] } else { T::zero() };
                c[i] = T::one() / denom;
                d[i] = (rhs - if i > 0 { d[i - 1] } else { T::zero() }) / denom;
            }
            for i in (0..k).rev() {
                let next = if i + 1 < k { m[i + 2] } else { T::zero() };
                m[i + 1] = d[i] - c[i] * next;
            }
        }
        Self { y, m }
    }

    fn eval(&self, s: T) -> T {
        let n = self.y.len();
        let i = s.floor().to_isize().unwrap_or(0).clamp(0, n as isize - 2) as usize;
        let t = s - T::from_count(i);
        let u = T::one() - t;
        let six = T::lit(6.0);
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        u * y0 + t * y1 + ((u * u * u - u) * m0 + (t * t * t - t) * m1) / six
    }

    fn eval_many(&self, pts: &[T]) -> Vec<T> {
        pts.iter().map(|&s| self.eval(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_examples() {
        assert_eq!(restrict(&[1.0, 2.0, 3.0, 4.0], 2, 2).unwrap(), vec![2.5]);
        assert_eq!(restrict(&[0.7; 24], 6, 4).unwrap(), vec![0.7; 6]);
        assert!(restrict(&[0.0; 6], 3, 2).is_err());
    }

    #[test]
    fn restrict_preserves_linear_fields_at_centroids() {
        let (nx, ny) = (8, 6);
        let f = |x: f64, y: f64| x + 2.0 * y;
        let fine: Vec<f64> = (0..nx * ny).map(|e| f((e / ny) as f64 + 0.5, (e % ny) as f64 + 0.5)).collect();
        let c = restrict(&fine, nx, ny).unwrap();
        for (e, v) in c.iter().enumerate() {
            let (cx, cy) = (e / (ny / 2), e % (ny / 2));
            assert!((v - f(2.0 * cx as f64 + 1.0, 2.0 * cy as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn prolong_reproduces_constants_and_linears() {
        for (nx, ny, kind) in [(5, 4, Interpolation::CubicSpline), (3, 2, Interpolation::Bilinear)] {
            let (p, k) = prolong(&vec![1.25f64; nx * ny], nx, ny).unwrap();
            assert_eq!(k, kind);
            assert!(p.iter().all(|v| (v - 1.25).abs() < 1e-14));
            let g = |x: f64, y: f64| 0.3 - 1.5 * x + 0.25 * y;
            let coarse: Vec<f64> = (0..nx * ny).map(|e| g(2.0 * (e / ny) as f64 + 1.0, 2.0 * (e % ny) as f64 + 1.0)).collect();
            let (p, _) = prolong(&coarse, nx, ny).unwrap();
            for (e, v) in p.iter().enumerate() {
                let (fx, fy) = (e / (2 * ny), e % (2 * ny));
                assert!((v - g(fx as f64 + 0.5, fy as f64 + 0.5)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spline_interpolates_knots() {
        let y = [0.0, 1.0, -2.0, 0.5, 3.0];
        let s = NaturalSpline::new(&y);
        for (i, &v) in y.iter().enumerate() {
            assert!((s.eval(i as f64) - v).abs() < 1e-14);
        }
        let h = 1e-5;
        for end in [0.0, 4.0] {
            let d2 = (s.eval(end + h) - 2.0 * s.eval(end) + s.eval(end - h)) / (h * h);
            assert!(d2.abs() < 1e-3, "second derivative {d2} at {end}");
        }
    }

    #[test]
    fn restriction_is_scaled_adjoint_of_injection() {
        // ⟨R f, c⟩ = ¼ ⟨f, P₀ c⟩ with P₀ the piecewise-constant injection.
        let fine: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).cos()).collect();
        let coarse = [0.3, -1.0, 2.0, 0.5];
        let inject: Vec<f64> = (0..16).map(|e| coarse[(e / 4 / 2) * 2 + (e % 4) / 2]).collect();
        let lhs: f64 = restrict(&fine, 4, 4).unwrap().iter().zip(&coarse).map(|(a, b)| a * b).sum();
        let rhs: f64 = fine.iter().zip(&inject).map(|(a, b)| a * b).sum::<f64>() * 0.25;
        assert!((lhs - rhs).abs() < 1e-14);
    }
}
