//! Control-variate estimators and their optimal coefficients.

use crate::error::{check_len, Error, Result};
use crate::linalg::{solve_dense, symmetric_eigen, DenseMatrix};
use crate::Real;

/// Whether `E[Y]` is known exactly or estimated from `n_l` extra samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanKind {
    Exact,
    Estimated { n_l: usize },
}

/// Paired draws of a primary quantity `X` and a control `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSamples<T> {
    x: Vec<Vec<T>>,
    y: Vec<Vec<T>>,
    y_mean: Vec<T>,
    kind: MeanKind,
}

impl<T: Real> PairedSamples<T> {
    pub fn new(x: Vec<Vec<T>>, y: Vec<Vec<T>>, y_mean: Vec<T>, kind: MeanKind) -> Result<Self> {
        check_len(x.len(), y.len())?;
        let d = y_mean.len();
        for v in x.iter().chain(&y) {
            check_len(d, v.len())?;
        }
        Ok(Self { x, y, y_mean, kind })
    }

    /// Scalar pairs.
    pub fn scalar(x: &[T], y: &[T], y_mean: T, kind: MeanKind) -> Result<Self> {
        Self::new(
            x.iter().map(|&v| vec![v]).collect(),
            y.iter().map(|&v| vec![v]).collect(),
            vec![y_mean],
            kind,
        )
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.y_mean.len()
    }

    pub fn kind(&self) -> MeanKind {
        self.kind
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            Err(Error::InsufficientData {
                needed,
                found: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CvCoefficient<T> {
    Scalar(T),
    Diagonal(Vec<T>),
    Matrix(DenseMatrix<T>),
}

impl<T: Real> CvCoefficient<T> {
    /// `α·v`
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        match self {
            CvCoefficient::Scalar(a) => Ok(v.iter().map(|&x| *a * x).collect()),
            CvCoefficient::Diagonal(d) => {
                check_len(d.len(), v.len())?;
                Ok(d.iter().zip(v).map(|(&a, &x)| a * x).collect())
            }
            CvCoefficient::Matrix(m) => {
                check_len(m.cols, v.len())?;
                Ok(m.mul_vec(v))
            }
        }
    }
}

/// Sample mean of `Z = X − α(Y − E[Y])`.
pub fn cv_estimate<T: Real>(pairs: &PairedSamples<T>, coeff: &CvCoefficient<T>) -> Result<Vec<T>> {
    pairs.require(1)?;
    let d = pairs.dim();
    let mut acc = vec![T::zero(); d];
    let mut dy = vec![T::zero(); d];
    for (x, y) in pairs.x.iter().zip(&pairs.y) {
        for i in 0..d {
            dy[i] = y[i] - pairs.y_mean[i];
        }
        let c = coeff.apply(&dy)?;
        check_len(d, c.len())?;
        for i in 0..d {
            acc[i] += x[i] - c[i];
        }
    }
    let n = T::from_count(pairs.len());
    Ok(acc.into_iter().map(|a| a / n).collect())
}

fn means<T: Real>(v: &[Vec<T>]) -> Vec<T> {
    crate::sgd::mean_vector(v)
}

/// Unbiased sample cross-covariance `Cov(a_i, b_j)` as a dense matrix.
fn cross_cov<T: Real>(a: &[Vec<T>], b: &[Vec<T>]) -> DenseMatrix<T> {
    let (ma, mb) = (means(a), means(b));
    let (da, db) = (ma.len(), mb.len());
    let mut c = DenseMatrix::zeros(da, db);
    for (u, v) in a.iter().zip(b) {
        for i in 0..da {
            let ui = u[i] - ma[i];
            for j in 0..db {
                c[(i, j)] += ui * (v[j] - mb[j]);
            }
        }
    }
    let k = T::from_count(a.len() - 1);
    for x in &mut c.data {
        *x /= k;
    }
    c
}

/// `σ̂_XY / σ̂²_Y` for one-dimensional pairs.
pub fn optimal_alpha_scalar<T: Real>(pairs: &PairedSamples<T>) -> Result<T> {
    check_len(1, pairs.dim())?;
    pairs.require(2)?;
    let cxy = cross_cov(&pairs.x, &pairs.y)[(0, 0)];
    let vx = cross_cov(&pairs.x, &pairs.x)[(0, 0)];
    let vy = cross_cov(&pairs.y, &pairs.y)[(0, 0)];
    if !(vy > T::lit(1e-14) * vx) || vy == T::zero() {
        return Err(Error::DegenerateAlpha { control_var: vy.as_f64() });
    }
    Ok(cxy / vy)
}

/// Condition-number ceiling for the control covariance.
pub const MAX_CONDITION: f64 = 1e12;

/// Trace-optimal matrix coefficient `ℂ_XY 𝕍_Y⁻¹` from sample moments.
pub fn optimal_alpha_matrix<T: Real>(pairs: &PairedSamples<T>) -> Result<CvCoefficient<T>> {
    pairs.require(2)?;
    let vy = cross_cov(&pairs.y, &pairs.y);
    let eig = symmetric_eigen(&vy)?;
    let hi = eig.values.first().copied().unwrap_or(T::zero());
    let lo = eig.values.last().copied().unwrap_or(T::zero());
    let cond = if lo > T::zero() { (hi / lo).as_f64() } else { f64::INFINITY };
    if !(cond < MAX_CONDITION) {
        return Err(Error::SingularCovariance { condition: cond });
    }
    // α 𝕍_Y = ℂ_XY  ⇔  𝕍_Y αᵀ = ℂ_YX
    let cyx = cross_cov(&pairs.y, &pairs.x);
    Ok(CvCoefficient::Matrix(solve_dense(&vy, &cyx)?.transpose()))
}

/// Per-direction coefficients with degeneracy flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalAlpha<T> {
    pub alpha: Vec<T>,
    pub degenerate: Vec<bool>,
}

impl<T: Real> DiagonalAlpha<T> {
    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    pub fn coefficient(&self) -> CvCoefficient<T> {
        CvCoefficient::Diagonal(self.alpha.clone())
    }
}

/// `α_ii = Σ_b (h_b − h̄)_i (l_b − l̄)_i / Σ_b (l_b − l̄)_i²`, both sides
/// centered at their own batch means.
///
/// Entries whose control variance vanishes (relative to the primary one) are
/// set to 0 and flagged; fewer than two samples flags every entry.
pub fn diagonal_alpha<T: Real>(high: &[Vec<T>], low: &[Vec<T>]) -> Result<DiagonalAlpha<T>> {
    check_len(high.len(), low.len())?;
    let n = high.first().or(low.first()).map_or(0, Vec::len);
    for v in high.iter().chain(low) {
        check_len(n, v.len())?;
    }
    if high.len() < 2 {
        return Ok(DiagonalAlpha {
            alpha: vec![T::zero(); n],
            degenerate: vec![true; n],
        });
    }
    let (mh, ml) = (means(high), means(low));
    let mut cov = vec![T::zero(); n];
    let mut var_l = vec![T::zero(); n];
    let mut var_h = vec![T::zero(); n];
    for (h, l) in high.iter().zip(low) {
        for i in 0..n {
            let (a, b) = (h[i] - mh[i], l[i] - ml[i]);
            cov[i] += a * b;
            var_l[i] += b * b;
            var_h[i] += a * a;
        }
    }
    let tiny = T::lit(1e-14);
    let mut alpha = vec![T::zero(); n];
    let mut degenerate = vec![false; n];
    for i in 0..n {
        if var_l[i] > tiny * var_h[i] && var_l[i] > T::min_positive_value() {
            alpha[i] = cov[i] / var_l[i];
        } else {
            degenerate[i] = true;
        }
    }
    Ok(DiagonalAlpha { alpha, degenerate })
}

/// `1 / (1 + N_h/N_l)`.
pub fn corrected_factor<T: Real>(n_h: usize, n_l: usize) -> T {
    T::one() / (T::one() + T::from_count(n_h) / T::from_count(n_l))
}

/// Shrinks a coefficient for an anchor mean estimated from `n_l` samples.
pub fn corrected_alpha<T: Real>(coeff: &CvCoefficient<T>, n_h: usize, n_l: usize) -> CvCoefficient<T> {
    let f = corrected_factor::<T>(n_h, n_l);
    match coeff {
        CvCoefficient::Scalar(a) => CvCoefficient::Scalar(*a * f),
        CvCoefficient::Diagonal(d) => CvCoefficient::Diagonal(d.iter().map(|&a| a * f).collect()),
        CvCoefficient::Matrix(m) => CvCoefficient::Matrix(DenseMatrix {
            data: m.data.iter().map(|&a| a * f).collect(),
            ..m.clone()
        }),
    }
}

/// Variance of the `N_h`-sample controlled mean at the optimal coefficient:
/// `(1−ρ²)σ²/N_h` with an exact control mean, `(1−ρ²/(1+N_h/N_l))σ²/N_h`
/// with one estimated from `N_l` samples.
pub fn predicted_variance<T: Real>(rho: T, var_x: T, n_h: usize, n_l: Option<usize>) -> Result<T> {
    if !(rho.abs() <= T::one()) {
        return Err(Error::DomainFault(format!("correlation {rho} outside [-1, 1]")));
    }
    if n_h == 0 || n_l == Some(0) {
        return Err(Error::DomainFault("sample counts must be positive".into()));
    }
    let r2 = rho * rho;
    let keep = match n_l {
        None => T::one() - r2,
        Some(n_l) => T::one() - r2 * corrected_factor::<T>(n_h, n_l),
    };
    Ok(keep * var_x / T::from_count(n_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(seed: u64, n: usize) -> Vec<f64> {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
    }

    #[test]
    fn zero_alpha_is_plain_mean() {
        let x = [1.0, 2.0, 6.0];
        let p = PairedSamples::scalar(&x, &[5.0, -1.0, 0.0], 0.3, MeanKind::Exact).unwrap();
        assert_eq!(cv_estimate(&p, &CvCoefficient::Scalar(0.0)).unwrap(), vec![3.0]);
    }

    #[test]
    fn perfect_control_gives_exact_mean() {
        let x = normals(1, 50);
        let p = PairedSamples::scalar(&x, &x, 0.0, MeanKind::Exact).unwrap();
        let est = cv_estimate(&p, &CvCoefficient::Scalar(1.0)).unwrap();
        assert!(est[0].abs() < 1e-15);
    }

    #[test]
    fn scalar_alpha_examples() {
        let x = normals(2, 400);
        let same = PairedSamples::scalar(&x, &x, 0.0, MeanKind::Exact).unwrap();
        assert!((optimal_alpha_scalar(&same).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        let p = PairedSamples::scalar(&x, &neg, 0.0, MeanKind::Exact).unwrap();
        assert!((optimal_alpha_scalar(&p).unwrap() + 0.5).abs() < 1e-12);
        let n = 10_000;
        let (a, b) = (normals(3, n), normals(4, n));
        let p = PairedSamples::scalar(&a, &b, 0.0, MeanKind::Exact).unwrap();
        assert!(optimal_alpha_scalar(&p).unwrap().abs() < 3.0 / (n as f64).sqrt());
        let p = PairedSamples::scalar(&a[..5], &[1.0; 5], 1.0, MeanKind::Exact).unwrap();
        assert!(matches!(optimal_alpha_scalar(&p), Err(Error::DegenerateAlpha { .. })));
    }

    #[test]
    fn matrix_alpha_examples() {
        let n = 300;
        let (a, b) = (normals(5, n), normals(6, n));
        let x: Vec<Vec<f64>> = a.iter().zip(&b).map(|(&u, &v)| vec![u, v]).collect();
        let p = PairedSamples::new(x.clone(), x.clone(), vec![0.0, 0.0], MeanKind::Exact).unwrap();
        let CvCoefficient::Matrix(m) = optimal_alpha_matrix(&p).unwrap() else { panic!() };
        for r in 0..2 {
            for c in 0..2 {
                assert!((m[(r, c)] - if r == c { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        let y: Vec<Vec<f64>> = x.iter().map(|v| vec![2.0 * v[0], 4.0 * v[1]]).collect();
        let p = PairedSamples::new(x.clone(), y, vec![0.0, 0.0], MeanKind::Exact).unwrap();
        let CvCoefficient::Matrix(m) = optimal_alpha_matrix(&p).unwrap() else { panic!() };
        assert!((m[(0, 0)] - 0.5).abs() < 1e-10 && (m[(1, 1)] - 0.25).abs() < 1e-10);
        assert!(m[(0, 1)].abs() < 1e-10 && m[(1, 0)].abs() < 1e-10);

        let short = vec![vec![1.0]; n];
        assert!(matches!(
            PairedSamples::new(x.clone(), short, vec![0.0, 0.0], MeanKind::Exact),
            Err(Error::DimensionFault { .. })
        ));
        let collinear: Vec<Vec<f64>> = x.iter().map(|v| vec![v[0], v[0]]).collect();
        let p = PairedSamples::new(x, collinear, vec![0.0, 0.0], MeanKind::Exact).unwrap();
        assert!(matches!(optimal_alpha_matrix(&p), Err(Error::SingularCovariance { .. })));
    }

    #[test]
    fn diagonal_alpha_examples() {
        let high: Vec<Vec<f64>> = normals(7, 20).chunks(2).map(|c| c.to_vec()).collect();
        let d = diagonal_alpha(&high, &high).unwrap();
        assert!(d.alpha.iter().all(|a| (a - 1.0).abs() < 1e-12));
        let low: Vec<Vec<f64>> = high.iter().map(|v| v.iter().map(|x| 3.0 * x).collect()).collect();
        let d = diagonal_alpha(&high, &low).unwrap();
        assert!(d.alpha.iter().all(|a| (a - 1.0 / 3.0).abs() < 1e-12));

        let toy = diagonal_alpha(&[vec![1.0f64], vec![2.0], vec![3.0]], &[vec![2.0], vec![4.0], vec![9.0]]).unwrap();
        assert!((toy.alpha[0] - 7.0 / 26.0).abs() < 1e-15);
        assert!((toy.alpha[0] - 0.2692).abs() < 1e-4);
    }

    #[test]
    fn diagonal_alpha_degeneracy() {
        let high = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        let low = vec![vec![5.0, 2.0], vec![5.0, 1.0]];
        let d = diagonal_alpha(&high, &low).unwrap();
        assert_eq!(d.degenerate, vec![true, false]);
        assert_eq!(d.alpha[0], 0.0);
        let one = diagonal_alpha(&high[..1], &low[..1]).unwrap();
        assert_eq!(one.degenerate_count(), 2);
    }

    #[test]
    fn correction_examples() {
        let CvCoefficient::Diagonal(a) = corrected_alpha(&CvCoefficient::Diagonal(vec![0.9f64]), 4, 20) else { panic!() };
        assert!((a[0] - 0.75).abs() < 1e-15);
        let CvCoefficient::Scalar(a) = corrected_alpha(&CvCoefficient::Scalar(0.8), 7, 7) else { panic!() };
        assert_eq!(a, 0.4);
        let CvCoefficient::Scalar(a) = corrected_alpha(&CvCoefficient::Scalar(0.8f64), 1, 1_000_000_000) else { panic!() };
        assert!((a - 0.8).abs() < 1e-9);
    }

    #[test]
    fn predicted_variance_examples() {
        assert_eq!(predicted_variance(1.0f64, 3.0, 4, None).unwrap(), 0.0);
        assert_eq!(predicted_variance(0.0f64, 3.0, 4, Some(9)).unwrap(), 0.75);
        assert!((predicted_variance(0.9f64, 1.0, 4, Some(20)).unwrap() - 0.08125).abs() < 1e-15);
        assert!(predicted_variance(1.1f64, 1.0, 4, None).is_err());
    }
}
