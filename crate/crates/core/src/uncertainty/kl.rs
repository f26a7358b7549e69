use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::Real;

/// Separable exponential covariance `σ² exp(−|Δx|/l1 − |Δy|/l2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSpec<T> {
    pub sigma: T,
    pub l1: T,
    pub l2: T,
}

impl<T: Real> CovarianceSpec<T> {
    pub fn new(sigma: T, l1: T, l2: T) -> Result<Self> {
        if !(sigma > T::zero() && l1 > T::zero() && l2 > T::zero()) {
            return Err(Error::DomainFault("sigma and correlation lengths must be positive".into()));
        }
        Ok(Self { sigma, l1, l2 })
    }

    pub fn eval(&self, a: (T, T), b: (T, T)) -> T {
        self.sigma * self.sigma * (-(a.0 - b.0).abs() / self.l1 - (a.1 - b.1).abs() / self.l2).exp()
    }
}

/// Truncated discrete Karhunen–Loève expansion over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct KLField<T> {
    /// Retained eigenvalues, non-increasing.
    pub values: Vec<T>,
    /// Retained eigenvectors, one per value, orthonormal in the Euclidean
    /// inner product over points.
    pub modes: Vec<Vec<T>>,
    /// `trace(C) = n·σ²`
    pub total_variance: T,
}

impl<T: Real> KLField<T> {
    pub fn n_modes(&self) -> usize {
        self.values.len()
    }

    pub fn n_points(&self) -> usize {
        self.modes.first().map_or(0, Vec::len)
    }

    pub fn captured_fraction(&self) -> T {
        self.values.iter().copied().sum::<T>() / self.total_variance
    }

    /// Variance of the truncated log-field at each point, `Σ λ_i ψ_i²`.
    pub fn pointwise_variance(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.n_points()];
        for (&l, m) in self.values.iter().zip(&self.modes) {
            for (a, &p) in v.iter_mut().zip(m) {
                *a += l * p * p;
            }
        }
        v
    }

    /// `z = Σ √λ_i ξ_i ψ_i`
    pub fn log_field(&self, xi: &[T]) -> Result<Vec<T>> {
        crate::error::check_len(self.n_modes(), xi.len())?;
        let mut z = vec![T::zero(); self.n_points()];
        for ((&l, m), &x) in self.values.iter().zip(&self.modes).zip(xi) {
            let c = l.max(T::zero()).sqrt() * x;
            if c == T::zero() {
                continue;
            }
            for (a, &p) in z.iter_mut().zip(m) {
                *a += c * p;
            }
        }
        Ok(z)
    }
}

fn truncate<T: Real>(values: Vec<T>, modes: Vec<Vec<T>>, n_max: usize, total: T) -> KLField<T> {
    KLField {
        values: values.into_iter().take(n_max).map(|v| v.max(T::zero())).collect(),
        modes: modes.into_iter().take(n_max).collect(),
        total_variance: total,
    }
}

/// Dense discrete KL: full eigen-decomposition of the point covariance matrix.
pub fn build_kl<T: Real>(spec: &CovarianceSpec<T>, centroids: &[(T, T)], n_max: usize) -> Result<KLField<T>> {
    let n = centroids.len();
    if n_max > n || n_max == 0 {
        return Err(Error::DimensionFault { expected: n, found: n_max });
    }
    let c = DenseMatrix::from_fn(n, n, |i, j| spec.eval(centroids[i], centroids[j]));
    let total: T = (0..n).map(|i| c[(i, i)]).sum();
    let eig = symmetric_eigen(&c)?;
    let modes = (0..n_max).map(|k| eig.vector(k)).collect();
    Ok(truncate(eig.values, modes, n_max, total))
}

/// KL on a regular `nx × ny` grid of cell centers with spacing `h`, stored
/// column-major (`x·ny + y`). The separable kernel makes the covariance a
/// Kronecker product, so eigenpairs are products of the 1-D ones.
pub fn build_kl_grid<T: Real>(spec: &CovarianceSpec<T>, nx: usize, ny: usize, h: T, n_max: usize) -> Result<KLField<T>> {
    let n = nx * ny;
    if n_max > n || n_max == 0 {
        return Err(Error::DimensionFault { expected: n, found: n_max });
    }
    let axis = |m: usize, l: T| {
        let c = DenseMatrix::from_fn(m, m, |i, j| (-(T::from_count(i.abs_diff(j)) * h) / l).exp());
        symmetric_eigen(&c)
    };
    let ex = axis(nx, spec.l1)?;
    let ey = axis(ny, spec.l2)?;
    let s2 = spec.sigma * spec.sigma;
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(n);
    for a in 0..nx {
        for b in 0..ny {
            pairs.push((s2 * ex.values[a] * ey.values[b], a, b));
        }
    }
    pairs.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(std::cmp::Ordering::Equal).then((p.1, p.2).cmp(&(q.1, q.2))));
    let mut values = Vec::with_capacity(n_max);
    let mut modes = Vec::with_capacity(n_max);
    for &(v, a, b) in pairs.iter().take(n_max) {
        let (va, vb) = (ex.vector(a), ey.vector(b));
        let mut m = Vec::with_capacity(n);
        for &x in &va {
            for &y in &vb {
                m.push(x * y);
            }
        }
        values.push(v);
        modes.push(m);
    }
    Ok(truncate(values, modes, n_max, s2 * T::from_count(n)))
}

/// Lognormal field `exp(z)` for one standard-normal vector.
pub fn sample_field<T: Real>(kl: &KLField<T>, xi: &[T]) -> Result<Vec<T>> {
    Ok(kl.log_field(xi)?.into_iter().map(|z| z.exp()).collect())
}

/// Directory cache of grid KL fields keyed by grid and kernel parameters.
#[derive(Debug, Clone)]
pub struct KlCache {
    pub dir: PathBuf,
}

impl KlCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path(&self, spec: &CovarianceSpec<f64>, nx: usize, ny: usize, h: f64, n_max: usize) -> PathBuf {
        self.dir.join(format!(
            "kl_{nx}x{ny}_h{h}_s{}_l{}_{}_n{n_max}.csv",
            spec.sigma, spec.l1, spec.l2
        ))
    }

    pub fn load_or_build(&self, spec: &CovarianceSpec<f64>, nx: usize, ny: usize, h: f64, n_max: usize) -> Result<KLField<f64>> {
        let path = self.path(spec, nx, ny, h, n_max);
        if let Ok(kl) = read_kl(&path) {
            if kl.n_modes() == n_max && kl.n_points() == nx * ny {
                return Ok(kl);
            }
        }
        let kl = build_kl_grid(spec, nx, ny, h, n_max)?;
        // A failed write only costs a rebuild next time.
        let _ = fs::create_dir_all(&self.dir).and_then(|_| write_kl(&path, &kl));
        Ok(kl)
    }
}

/// First line: total variance then eigenvalues; one line per mode after.
pub fn write_kl(path: &Path, kl: &KLField<f64>) -> std::io::Result<()> {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
    let mut out = format!("{:e},{}\n", kl.total_variance, join(&kl.values));
    for m in &kl.modes {
        out.push_str(&join(m));
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn read_kl(path: &Path) -> Result<KLField<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::ConfigFault(format!("{}: {e}", path.display())))?;
    let parse = |line: &str| -> Result<Vec<f64>> {
        line.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::ConfigFault(format!("bad KL cache entry {s:?}: {e}"))))
            .collect()
    };
    let mut lines = text.lines();
    let head = parse(lines.next().unwrap_or(""))?;
    let (total, values) = head.split_first().ok_or_else(|| Error::ConfigFault("empty KL cache".into()))?;
    let modes = lines.map(parse).collect::<Result<Vec<_>>>()?;
    if modes.len() != values.len() {
        return Err(Error::ConfigFault("KL cache mode count mismatch".into()));
    }
    Ok(KLField {
        values: values.to_vec(),
        modes,
        total_variance: *total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let spec = CovarianceSpec::new(1.5f64, 2.0, 2.0).unwrap();
        let kl = build_kl(&spec, &[(0.0, 0.0)], 1).unwrap();
        assert!((kl.values[0] - 2.25).abs() < 1e-15);
        assert!((kl.captured_fraction() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_points_by_hand() {
        let spec = CovarianceSpec::new(2.0, 3.0, 1.0).unwrap();
        let d = 1.7;
        let kl = build_kl(&spec, &[(0.0, 0.0), (d, 0.0)], 2).unwrap();
        let r = (-d / 3.0f64).exp();
        assert!((kl.values[0] - 4.0 * (1.0 + r)).abs() < 1e-13);
        assert!((kl.values[1] - 4.0 * (1.0 - r)).abs() < 1e-13);
        let s = 0.5f64.sqrt();
        assert!((kl.modes[0][0].abs() - s).abs() < 1e-13 && (kl.modes[0][0] - kl.modes[0][1]).abs() < 1e-13);
        assert!((kl.modes[1][0] + kl.modes[1][1]).abs() < 1e-13);
    }

    #[test]
    fn grid_route_matches_dense_route() {
        let spec = CovarianceSpec::new(2.0, 1.5, 2.5).unwrap();
        let (nx, ny) = (7, 5);
        let pts: Vec<(f64, f64)> = (0..nx * ny).map(|e| ((e / ny) as f64 + 0.5, (e % ny) as f64 + 0.5)).collect();
        let dense = build_kl(&spec, &pts, nx * ny).unwrap();
        let grid = build_kl_grid(&spec, nx, ny, 1.0, nx * ny).unwrap();
        for (a, b) in dense.values.iter().zip(&grid.values) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!((dense.captured_fraction() - 1.0).abs() < 1e-12);
        for k in [3, 10, 20] {
            let (a, b) = (build_kl(&spec, &pts, k).unwrap(), build_kl_grid(&spec, nx, ny, 1.0, k).unwrap());
            assert!((a.captured_fraction() - b.captured_fraction()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_is_unit_field() {
        let spec = CovarianceSpec::new(2.0f64, 3.0, 3.0).unwrap();
        let kl = build_kl_grid(&spec, 6, 4, 1.0, 5).unwrap();
        assert!(sample_field(&kl, &[0.0; 5]).unwrap().iter().all(|&e| e == 1.0));
        let one = sample_field(&kl, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        for (e, &p) in one.iter().zip(&kl.modes[0]) {
            assert!((e - (kl.values[0].sqrt() * p).exp()).abs() < 1e-14);
        }
        assert!(sample_field(&kl, &[0.0; 4]).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = KlCache::new(dir.path());
        let spec = CovarianceSpec::new(2.0, 3.0, 3.0).unwrap();
        let a = cache.load_or_build(&spec, 6, 4, 1.0, 5).unwrap();
        assert!(cache.path(&spec, 6, 4, 1.0, 5).exists());
        let b = cache.load_or_build(&spec, 6, 4, 1.0, 5).unwrap();
        assert_eq!(a, b);
    }
}
