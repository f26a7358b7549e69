//! Strongly convex quadratic with additive Gaussian gradient noise.
//!
//! `J(θ) = ½(θ−θ*)ᵀA(θ−θ*)` with `A = diag(linspace(μ, L))`. A realization
//! carries `2n` standard normals: the first `n` drive the HIGH noise, the
//! rest are the independent stream mixed into LOW.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, Error, Result};
use crate::sgd::{BiFidelityOracle, Fidelity, RandomRealization};
use crate::Real;

#[derive(Debug, Clone)]
pub struct QuadraticTestProblem<T> {
    diag: Vec<T>,
    theta_star: Vec<T>,
    noise: T,
    low_scale: T,
    low_bias: Vec<T>,
    rho: T,
    gamma: T,
}

impl<T: Real> QuadraticTestProblem<T> {
    /// Noise-free problem with `θ* = 1` and LOW identical to HIGH.
    pub fn new(n: usize, mu: T, l: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::ConfigFault("quadratic dimension must be at least 1".into()));
        }
        if !(mu > T::zero()) || !(l >= mu) || !l.is_finite() {
            return Err(Error::ConfigFault(format!("need 0 < mu <= L, got mu={mu}, L={l}")));
        }
        let diag = if n == 1 {
            vec![mu]
        } else {
            (0..n)
                .map(|i| mu + (l - mu) * T::from_count(i) / T::from_count(n - 1))
                .collect()
        };
        Ok(Self {
            diag,
            theta_star: vec![T::one(); n],
            noise: T::zero(),
            low_scale: T::one(),
            low_bias: vec![T::zero(); n],
            rho: T::one(),
            gamma: T::lit(0.1),
        })
    }

    pub fn with_noise(mut self, std: T) -> Result<Self> {
        if !(std >= T::zero()) {
            return Err(Error::ConfigFault(format!("noise std must be >= 0, got {std}")));
        }
        self.noise = std;
        Ok(self)
    }

    /// LOW gradient `c·A(θ−θ*) + bias + noise·(ρε + √(1−ρ²)ε′)`.
    pub fn with_low(mut self, scale: T, bias: T, rho: T) -> Result<Self> {
        if !(rho.abs() <= T::one()) {
            return Err(Error::ConfigFault(format!("correlation must lie in [-1, 1], got {rho}")));
        }
        self.low_scale = scale;
        self.low_bias = vec![bias; self.diag.len()];
        self.rho = rho;
        Ok(self)
    }

    pub fn with_theta_star(mut self, theta_star: Vec<T>) -> Result<Self> {
        check_len(self.diag.len(), theta_star.len())?;
        self.theta_star = theta_star;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn mu(&self) -> T {
        self.diag[0]
    }

    pub fn l(&self) -> T {
        self.diag[self.diag.len() - 1]
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.diag
    }

    pub fn theta_star(&self) -> &[T] {
        &self.theta_star
    }

    pub fn noise(&self) -> T {
        self.noise
    }

    /// Noise-free `A(θ−θ*)`.
    pub fn core_grad(&self, theta: &[T]) -> Vec<T> {
        self.diag
            .iter()
            .zip(theta.iter().zip(&self.theta_star))
            .map(|(&a, (&t, &s))| a * (t - s))
            .collect()
    }

    fn check(&self, theta: &[T], xi: &RandomRealization<T>) -> Result<()> {
        check_len(self.diag.len(), theta.len())?;
        check_len(2 * self.diag.len(), xi.xi.len())
    }

    fn noise_term(&self, i: usize, xi: &[T], fidelity: Fidelity) -> T {
        let n = self.diag.len();
        match fidelity {
            Fidelity::High => self.noise * xi[i],
            Fidelity::Low => {
                let comp = (T::one() - self.rho * self.rho).max(T::zero()).sqrt();
                self.noise * (self.rho * xi[i] + comp * xi[n + i])
            }
        }
    }
}

impl<T: Real> BiFidelityOracle<T> for QuadraticTestProblem<T> {
    fn n_theta(&self) -> usize {
        self.diag.len()
    }

    fn n_xi(&self) -> usize {
        2 * self.diag.len()
    }

    fn gamma(&self) -> T {
        self.gamma
    }

    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T> {
        let xi = (0..self.n_xi())
            .map(|_| T::lit(StandardNormal.sample(&mut *rng)))
            .collect();
        RandomRealization::new(xi)
    }

    fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>> {
        self.check(theta, xi)?;
        let core = self.core_grad(theta);
        Ok(core
            .into_iter()
            .enumerate()
            .map(|(i, g)| match fidelity {
                Fidelity::High => g + self.noise_term(i, &xi.xi, fidelity),
                Fidelity::Low => self.low_scale * g + self.low_bias[i] + self.noise_term(i, &xi.xi, fidelity),
            })
            .collect())
    }

    fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
        self.check(theta, xi)?;
        let half = T::lit(0.5);
        let mut j = T::zero();
        for i in 0..self.diag.len() {
            let d = theta[i] - self.theta_star[i];
            let e = self.noise_term(i, &xi.xi, fidelity);
            j += match fidelity {
                Fidelity::High => half * self.diag[i] * d * d + e * d,
                Fidelity::Low => self.low_scale * half * self.diag[i] * d * d + (self.low_bias[i] + e) * d,
            };
        }
        Ok(j)
    }

    fn exact_mean_grad(&self, theta: &[T], fidelity: Fidelity) -> Option<Result<Vec<T>>> {
        if let Err(e) = check_len(self.diag.len(), theta.len()) {
            return Some(Err(e));
        }
        let core = self.core_grad(theta);
        Some(Ok(match fidelity {
            Fidelity::High => core,
            Fidelity::Low => core
                .iter()
                .zip(&self.low_bias)
                .map(|(&g, &b)| self.low_scale * g + b)
                .collect(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_curvature() {
        assert!(QuadraticTestProblem::<f64>::new(2, 0.0, 1.0).is_err());
        assert!(QuadraticTestProblem::<f64>::new(2, 2.0, 1.0).is_err());
        assert!(QuadraticTestProblem::<f64>::new(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn noise_free_identical_fidelities() {
        let p = QuadraticTestProblem::new(3, 1.0, 4.0).unwrap();
        assert_eq!(p.eigenvalues(), &[1.0, 2.5, 4.0]);
        let xi = p.sample(&mut stream(1, Purpose::Pool, 0, 0));
        let th = [0.3, -2.0, 5.0];
        assert_eq!(
            p.grad(&th, &xi, Fidelity::High).unwrap(),
            p.grad(&th, &xi, Fidelity::Low).unwrap()
        );
        assert_eq!(p.grad(&th, &xi, Fidelity::High).unwrap(), vec![-0.7, -7.5, 16.0]);
    }

    #[test]
    fn gradient_at_optimum_is_zero_mean_noise() {
        let p = QuadraticTestProblem::new(2, 1.0, 2.0).unwrap().with_noise(0.7).unwrap();
        let mut rng = stream(2, Purpose::Pool, 0, 0);
        let n = 20_000;
        let mut s = [0.0; 2];
        for _ in 0..n {
            let g = p.grad(&[1.0, 1.0], &p.sample(&mut rng), Fidelity::High).unwrap();
            s[0] += g[0];
            s[1] += g[1];
        }
        for v in s {
            assert!((v / n as f64).abs() < 4.0 * 0.7 / (n as f64).sqrt());
        }
    }

    #[test]
    fn correlation_knob() {
        let p = QuadraticTestProblem::new(3, 1.0, 3.0)
            .unwrap()
            .with_noise(1.0)
            .unwrap()
            .with_low(0.8, 0.1, 0.95)
            .unwrap();
        let th = [0.0, 2.0, -1.0];
        let mut rng = stream(3, Purpose::Pool, 0, 0);
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..10_000)
            .map(|_| {
                let xi = p.sample(&mut rng);
                (p.grad(&th, &xi, Fidelity::High).unwrap(), p.grad(&th, &xi, Fidelity::Low).unwrap())
            })
            .collect();
        for d in 0..3 {
            let x: Vec<f64> = pairs.iter().map(|(h, _)| h[d]).collect();
            let y: Vec<f64> = pairs.iter().map(|(_, l)| l[d]).collect();
            let (mx, my) = (x.iter().sum::<f64>() / 1e4, y.iter().sum::<f64>() / 1e4);
            let cxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
            let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
            let r = cxy / (vx * vy).sqrt();
            assert!((r - 0.95).abs() < 0.02, "direction {d}: {r}");
        }
    }

    proptest! {
        #[test]
        fn strong_convexity_and_lipschitz(th in proptest::collection::vec(-50.0f64..50.0, 4)) {
            let p = QuadraticTestProblem::new(4, 0.5, 3.0).unwrap();
            let g = p.core_grad(&th);
            let d: Vec<f64> = th.iter().map(|t| t - 1.0).collect();
            let dd: f64 = d.iter().map(|v| v * v).sum();
            let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let gg: f64 = g.iter().map(|v| v * v).sum();
            prop_assert!(gd >= 0.5 * dd * (1.0 - 1e-12));
            prop_assert!(gg <= 9.0 * dd * (1.0 + 1e-12));
        }
    }
}
