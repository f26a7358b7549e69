//! Fourth-order polynomial regression with a second-order Taylor surrogate.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, DenseMatrix};
use crate::rng::{Purpose, StreamRng};
use crate::scalar::dot;
use crate::sgd::{BiFidelityOracle, Fidelity, RandomRealization};
use crate::Real;

pub const TRUE_COEFFS: [f64; 5] = [2.0, 5.0, 1.75, 5.0, 6.5];
pub const INITIAL_GUESS: [f64; 5] = [1.5, 4.0, 1.0, 4.0, 5.0];
pub const NOISE_STD: f64 = 0.5;
pub const ANCHOR_SPACING: f64 = 0.25;

fn coeffs<T: Real>() -> [T; 5] {
    TRUE_COEFFS.map(T::lit)
}

/// `[1, x, x², x³, x⁴]`
pub fn basis<T: Real>(x: T) -> [T; 5] {
    let x2 = x * x;
    [T::one(), x, x2, x2 * x, x2 * x2]
}

/// Second-order Taylor expansion of each monomial about `x0`.
pub fn taylor_basis<T: Real>(x: T, x0: T) -> [T; 5] {
    let d = x - x0;
    let half = T::lit(0.5);
    let mut out = [T::zero(); 5];
    for (p, o) in out.iter_mut().enumerate() {
        let pf = T::from_count(p);
        let v = if p == 0 { T::one() } else { x0.powi(p as i32) };
        let d1 = if p >= 1 { pf * x0.powi(p as i32 - 1) } else { T::zero() };
        let d2 = if p >= 2 { pf * (pf - T::one()) * x0.powi(p as i32 - 2) } else { T::zero() };
        *o = v + d1 * d + half * d2 * d * d;
    }
    out
}

/// `2 + 5x + 1.75x² + 5x³ + 6.5x⁴`
pub fn poly_high<T: Real>(x: T) -> T {
    dot(&coeffs::<T>(), &basis(x))
}

/// Gradient of `(y_obs − θ·φ(x))²` with respect to `θ`.
pub fn poly_high_grad<T: Real>(theta: &[T], x: T, y_obs: T) -> Vec<T> {
    residual_grad(theta, &basis(x), y_obs)
}

/// Taylor model of [`poly_high`] about `x0`.
pub fn poly_low<T: Real>(x: T, x0: T) -> T {
    dot(&coeffs::<T>(), &taylor_basis(x, x0))
}

/// Surrogate gradient: the monomial basis is replaced by its Taylor
/// expansion about the anchor nearest to `x`.
pub fn poly_low_grad<T: Real>(theta: &[T], x: T, y_obs: T) -> Vec<T> {
    residual_grad(theta, &taylor_basis(x, nearest_anchor(x)), y_obs)
}

fn residual_grad<T: Real>(theta: &[T], phi: &[T; 5], y_obs: T) -> Vec<T> {
    let r = y_obs - dot(theta, phi);
    let m2 = T::lit(-2.0) * r;
    phi.iter().map(|&p| m2 * p).collect()
}

/// Nearest point of `{−1, −0.75, …, 1}`; exact midpoints go to the smaller.
pub fn nearest_anchor<T: Real>(x: T) -> T {
    let h = T::lit(ANCHOR_SPACING);
    let s = (x + T::one()) / h;
    let lo = s.floor();
    let k = if s - lo > T::lit(0.5) { lo + T::one() } else { lo };
    let k = k.max(T::zero()).min(T::lit(8.0));
    k * h - T::one()
}

/// `(x_i, y_i)` with `x ~ U[−1, 1]` and Gaussian noise of variance 0.25.
pub fn gen_observations<T: Real>(seed: u64, n: usize) -> Result<Vec<(T, T)>> {
    if n == 0 {
        return Err(Error::ConfigFault("at least one observation is required".into()));
    }
    let mut rng = StreamRng::seed_from_u64(crate::rng::stream_key(seed, Purpose::Problem, 0, 0));
    let noise = Normal::new(0.0, NOISE_STD).expect("valid normal");
    Ok((0..n)
        .map(|_| {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let e = noise.sample(&mut rng);
            let x = T::lit(x);
            (x, poly_high(x) + T::lit(e))
        })
        .collect())
}

/// Finite-sample regression problem; each realization is one observation.
#[derive(Debug, Clone)]
pub struct PolyRegressionProblem<T> {
    population: Vec<RandomRealization<T>>,
    gamma: T,
}

impl<T: Real> PolyRegressionProblem<T> {
    pub fn new(observations: &[(T, T)], gamma: T) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::ConfigFault("at least one observation is required".into()));
        }
        let population = observations
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| RandomRealization::indexed(vec![x, y], i))
            .collect();
        Ok(Self { population, gamma })
    }

    pub fn generate(seed: u64, n: usize, gamma: T) -> Result<Self> {
        Self::new(&gen_observations(seed, n)?, gamma)
    }

    /// Mean squared residual over all observations.
    pub fn mse(&self, theta: &[T]) -> T {
        let s: T = self
            .population
            .iter()
            .map(|r| {
                let e = r.xi[1] - dot(theta, &basis(r.xi[0]));
                e * e
            })
            .sum();
        s / T::from_count(self.population.len())
    }

    /// Ordinary least-squares coefficients.
    pub fn least_squares(&self) -> Result<Vec<T>> {
        let mut a = DenseMatrix::zeros(5, 5);
        let mut b = DenseMatrix::zeros(5, 1);
        for r in &self.population {
            let phi = basis(r.xi[0]);
            for i in 0..5 {
                b[(i, 0)] += phi[i] * r.xi[1];
                for j in 0..5 {
                    a[(i, j)] += phi[i] * phi[j];
                }
            }
        }
        Ok(solve_dense(&a, &b)?.data)
    }
}

impl<T: Real> BiFidelityOracle<T> for PolyRegressionProblem<T> {
    fn n_theta(&self) -> usize {
        5
    }

    fn n_xi(&self) -> usize {
        2
    }

    fn gamma(&self) -> T {
        self.gamma
    }

    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T> {
        let i = rng.random_range(0..self.population.len());
        self.population[i].clone()
    }

    fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>> {
        crate::error::check_len(5, theta.len())?;
        let (x, y) = (xi.xi[0], xi.xi[1]);
        Ok(match fidelity {
            Fidelity::High => poly_high_grad(theta, x, y),
            Fidelity::Low => poly_low_grad(theta, x, y),
        })
    }

    fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
        let (x, y) = (xi.xi[0], xi.xi[1]);
        let phi = match fidelity {
            Fidelity::High => basis(x),
            Fidelity::Low => taylor_basis(x, nearest_anchor(x)),
        };
        let e = y - dot(theta, &phi);
        Ok(e * e)
    }

    fn population(&self) -> Option<&[RandomRealization<T>]> {
        Some(&self.population)
    }

    fn exact_mean_grad(&self, theta: &[T], fidelity: Fidelity) -> Option<Result<Vec<T>>> {
        let gs: Result<Vec<Vec<T>>> = self.population.iter().map(|r| self.grad(theta, r, fidelity)).collect();
        Some(gs.map(|g| crate::sgd::mean_vector(&g)))
    }
}
