use rand::RngCore;

use crate::error::{check_len, Error, Result};
use crate::scalar::{axpy, first_non_finite};
use crate::sgd::{BiFidelityOracle, Fidelity, RandomRealization};
use crate::Real;

/// Inequality constraint `g(θ; ξ) ≤ 0`.
pub trait Constraint<T: Real>: Send + Sync {
    fn value(&self, theta: &[T], xi: &RandomRealization<T>) -> T;
    fn gradient(&self, theta: &[T], xi: &RandomRealization<T>) -> Vec<T>;
}

/// Quadratic exterior penalty `Σ_j κ_j (g_j⁺)²`.
pub struct PenaltySpec<T: Real> {
    kappa: Vec<T>,
    constraints: Vec<Box<dyn Constraint<T>>>,
}

impl<T: Real> PenaltySpec<T> {
    pub fn none() -> Self {
        Self {
            kappa: vec![],
            constraints: vec![],
        }
    }

    pub fn new(kappa: Vec<T>, constraints: Vec<Box<dyn Constraint<T>>>) -> Result<Self> {
        check_len(constraints.len(), kappa.len())?;
        if let Some(j) = kappa.iter().position(|k| !(*k >= T::zero())) {
            return Err(Error::ConfigFault(format!("penalty weight kappa[{j}] must be non-negative")));
        }
        Ok(Self { kappa, constraints })
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn value(&self, theta: &[T], xi: &RandomRealization<T>) -> T {
        self.kappa
            .iter()
            .zip(&self.constraints)
            .map(|(&k, g)| {
                let gp = g.value(theta, xi).max(T::zero());
                k * gp * gp
            })
            .sum()
    }

    /// Adds `Σ κ_j ∇(g_j⁺)²` to `grad`.
    pub fn add_gradient(&self, theta: &[T], xi: &RandomRealization<T>, grad: &mut [T]) {
        let two = T::lit(2.0);
        for (&k, g) in self.kappa.iter().zip(&self.constraints) {
            let gp = g.value(theta, xi);
            if gp > T::zero() && k > T::zero() {
                axpy(two * k * gp, &g.gradient(theta, xi), grad);
            }
        }
    }
}

/// `∇f(θ;ξ) + Σ_j κ_j ∇(g_j⁺(θ;ξ))²` at the requested fidelity.
pub fn penalty_gradient<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    penalty: &PenaltySpec<T>,
    theta: &[T],
    xi: &RandomRealization<T>,
    fidelity: Fidelity,
) -> Result<Vec<T>> {
    let mut g = oracle.grad(theta, xi, fidelity)?;
    penalty.add_gradient(theta, xi, &mut g);
    match first_non_finite(&g) {
        Some(index) => Err(Error::NumericalFault { index }),
        None => Ok(g),
    }
}

/// Oracle whose objective and gradients include a penalty term.
pub struct PenalizedOracle<O, T: Real> {
    pub inner: O,
    pub penalty: PenaltySpec<T>,
}

impl<T: Real, O: BiFidelityOracle<T>> BiFidelityOracle<T> for PenalizedOracle<O, T> {
    fn n_theta(&self) -> usize {
        self.inner.n_theta()
    }

    fn n_xi(&self) -> usize {
        self.inner.n_xi()
    }

    fn gamma(&self) -> T {
        self.inner.gamma()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T> {
        self.inner.sample(rng)
    }

    fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>> {
        penalty_gradient(&self.inner, &self.penalty, theta, xi, fidelity)
    }

    fn grad_batch(&self, theta: &[T], xis: &[RandomRealization<T>], fidelity: Fidelity) -> Result<Vec<Vec<T>>> {
        let mut gs = self.inner.grad_batch(theta, xis, fidelity)?;
        for (g, xi) in gs.iter_mut().zip(xis) {
            self.penalty.add_gradient(theta, xi, g);
            if let Some(index) = first_non_finite(g) {
                return Err(Error::NumericalFault { index });
            }
        }
        Ok(gs)
    }

    fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
        Ok(self.inner.objective(theta, xi, fidelity)? + self.penalty.value(theta, xi))
    }

    fn mean_objective(&self, theta: &[T], xis: &[RandomRealization<T>]) -> Result<T> {
        let base = self.inner.mean_objective(theta, xis)?;
        let pen: T = xis.iter().map(|xi| self.penalty.value(theta, xi)).sum();
        Ok(base + pen / T::from_count(xis.len().max(1)))
    }

    fn population(&self) -> Option<&[RandomRealization<T>]> {
        self.inner.population()
    }

    fn mass_ratio(&self, theta: &[T]) -> Option<T> {
        self.inner.mass_ratio(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f ≡ c·θ (gradient c), one-dimensional.
    struct Linear(Vec<f64>);

    impl BiFidelityOracle<f64> for Linear {
        fn n_theta(&self) -> usize {
            self.0.len()
        }
        fn n_xi(&self) -> usize {
            0
        }
        fn gamma(&self) -> f64 {
            0.5
        }
        fn sample(&self, _: &mut dyn RngCore) -> RandomRealization<f64> {
            RandomRealization::new(vec![])
        }
        fn grad(&self, _: &[f64], _: &RandomRealization<f64>, _: Fidelity) -> Result<Vec<f64>> {
            Ok(self.0.clone())
        }
        fn objective(&self, t: &[f64], _: &RandomRealization<f64>, _: Fidelity) -> Result<f64> {
            Ok(crate::scalar::dot(&self.0, t))
        }
    }

    struct Shifted(f64);

    impl Constraint<f64> for Shifted {
        fn value(&self, t: &[f64], _: &RandomRealization<f64>) -> f64 {
            t[0] - self.0
        }
        fn gradient(&self, _: &[f64], _: &RandomRealization<f64>) -> Vec<f64> {
            vec![1.0]
        }
    }

    fn xi() -> RandomRealization<f64> {
        RandomRealization::new(vec![])
    }

    #[test]
    fn no_constraints_passes_gradient_through() {
        let g = penalty_gradient(&Linear(vec![2.0, -1.0]), &PenaltySpec::none(), &[0.0, 0.0], &xi(), Fidelity::High);
        assert_eq!(g.unwrap(), vec![2.0, -1.0]);
    }

    #[test]
    fn inactive_constraint_adds_nothing() {
        let p = PenaltySpec::new(vec![1.0], vec![Box::new(Shifted(5.0)) as Box<dyn Constraint<f64>>]).unwrap();
        let g = penalty_gradient(&Linear(vec![1.0]), &p, &[3.0], &xi(), Fidelity::High).unwrap();
        assert_eq!(g, vec![1.0]);
    }

    #[test]
    fn active_constraint_chain_rule() {
        let p = PenaltySpec::new(vec![2.0], vec![Box::new(Shifted(0.0)) as Box<dyn Constraint<f64>>]).unwrap();
        let g = penalty_gradient(&Linear(vec![0.0]), &p, &[3.0], &xi(), Fidelity::High).unwrap();
        assert_eq!(g, vec![12.0]);
        let wrapped = PenalizedOracle { inner: Linear(vec![0.0]), penalty: p };
        assert_eq!(wrapped.objective(&[3.0], &xi(), Fidelity::Low).unwrap(), 18.0);
    }

    #[test]
    fn non_finite_gradient_reports_index() {
        let g = penalty_gradient(&Linear(vec![0.0, f64::NAN]), &PenaltySpec::none(), &[0.0, 0.0], &xi(), Fidelity::High);
        assert_eq!(g, Err(Error::NumericalFault { index: 1 }));
    }

    #[test]
    fn negative_kappa_rejected() {
        assert!(PenaltySpec::new(vec![-1.0], vec![Box::new(Shifted(0.0)) as Box<dyn Constraint<f64>>]).is_err());
    }
}
