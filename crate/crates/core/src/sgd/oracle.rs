use rand::RngCore;

use crate::error::Result;
use crate::rng::{stream, Purpose};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fidelity {
    Low,
    High,
}

/// One draw of the random inputs. `index` identifies a member of a finite
/// pre-drawn set (0-based) when the draw came from one.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomRealization<T> {
    pub xi: Vec<T>,
    pub index: Option<usize>,
}

impl<T> RandomRealization<T> {
    pub fn new(xi: Vec<T>) -> Self {
        Self { xi, index: None }
    }

    pub fn indexed(xi: Vec<T>, index: usize) -> Self {
        Self { xi, index: Some(index) }
    }
}

/// Stochastic gradients of one objective at two fidelities.
///
/// A HIGH call costs one unit, a LOW call costs [`gamma`](Self::gamma) units.
pub trait BiFidelityOracle<T: Real>: Send + Sync {
    fn n_theta(&self) -> usize;

    fn n_xi(&self) -> usize;

    fn gamma(&self) -> T;

    fn cost(&self, fidelity: Fidelity) -> T {
        match fidelity {
            Fidelity::High => T::one(),
            Fidelity::Low => self.gamma(),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T>;

    fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>>;

    fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T>;

    /// Gradients for several realizations at one design, in input order.
    fn grad_batch(&self, theta: &[T], xis: &[RandomRealization<T>], fidelity: Fidelity) -> Result<Vec<Vec<T>>> {
        xis.iter().map(|xi| self.grad(theta, xi, fidelity)).collect()
    }

    /// Mean HIGH objective over a fixed set of realizations.
    fn mean_objective(&self, theta: &[T], xis: &[RandomRealization<T>]) -> Result<T> {
        let mut s = T::zero();
        for xi in xis {
            s += self.objective(theta, xi, Fidelity::High)?;
        }
        Ok(s / T::from_count(xis.len().max(1)))
    }

    /// The complete finite set of realizations, when the problem has one.
    fn population(&self) -> Option<&[RandomRealization<T>]> {
        None
    }

    /// Exact expectation of the gradient over the random inputs, when it is
    /// available in closed form.
    fn exact_mean_grad(&self, _theta: &[T], _fidelity: Fidelity) -> Option<Result<Vec<T>>> {
        None
    }

    /// Filtered material fraction for density problems.
    fn mass_ratio(&self, _theta: &[T]) -> Option<T> {
        None
    }
}

macro_rules! forward_oracle {
    ($($ptr:ty),*) => {$(
        impl<T: Real, O: BiFidelityOracle<T> + ?Sized> BiFidelityOracle<T> for $ptr {
            fn n_theta(&self) -> usize {
                (**self).n_theta()
            }
            fn n_xi(&self) -> usize {
                (**self).n_xi()
            }
            fn gamma(&self) -> T {
                (**self).gamma()
            }
            fn cost(&self, fidelity: Fidelity) -> T {
                (**self).cost(fidelity)
            }
            fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T> {
                (**self).sample(rng)
            }
            fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>> {
                (**self).grad(theta, xi, fidelity)
            }
            fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
                (**self).objective(theta, xi, fidelity)
            }
            fn grad_batch(&self, theta: &[T], xis: &[RandomRealization<T>], fidelity: Fidelity) -> Result<Vec<Vec<T>>> {
                (**self).grad_batch(theta, xis, fidelity)
            }
            fn mean_objective(&self, theta: &[T], xis: &[RandomRealization<T>]) -> Result<T> {
                (**self).mean_objective(theta, xis)
            }
            fn population(&self) -> Option<&[RandomRealization<T>]> {
                (**self).population()
            }
            fn exact_mean_grad(&self, theta: &[T], fidelity: Fidelity) -> Option<Result<Vec<T>>> {
                (**self).exact_mean_grad(theta, fidelity)
            }
            fn mass_ratio(&self, theta: &[T]) -> Option<T> {
                (**self).mass_ratio(theta)
            }
        }
    )*};
}

forward_oracle!(Box<O>, std::sync::Arc<O>);

/// Draws `count` realizations, each from its own counter-keyed stream.
pub fn draw_realizations<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    seed: u64,
    purpose: Purpose,
    iteration: u64,
    count: usize,
) -> Vec<RandomRealization<T>> {
    (0..count)
        .map(|i| oracle.sample(&mut stream(seed, purpose, iteration, i as u64)))
        .collect()
}

/// Component-wise mean of equally sized vectors, summed in input order.
pub fn mean_vector<T: Real>(vs: &[Vec<T>]) -> Vec<T> {
    let n = vs.first().map_or(0, Vec::len);
    let mut m = vec![T::zero(); n];
    for v in vs {
        for (a, &b) in m.iter_mut().zip(v) {
            *a += b;
        }
    }
    let k = T::from_count(vs.len().max(1));
    for a in &mut m {
        *a /= k;
    }
    m
}
