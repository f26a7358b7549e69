//! Concrete oracles: polynomial regression, SIMP topology optimization and a
//! strongly convex quadratic.

mod poly;
mod quadratic;
mod topopt;

pub use poly::{
    basis, gen_observations, nearest_anchor, poly_high, poly_high_grad, poly_low, poly_low_grad, taylor_basis,
    PolyRegressionProblem, ANCHOR_SPACING, INITIAL_GUESS, NOISE_STD, TRUE_COEFFS,
};
pub use quadratic::QuadraticTestProblem;
pub use topopt::{TopOptProblem, TopOptSpec, TopOptVariant};
