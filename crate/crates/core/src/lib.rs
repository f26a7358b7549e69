//! Bi-fidelity stochastic gradient optimization.
//!
//! Optimizers (SGD, SAG, SVRG and their bi-fidelity variants BF-SAG and
//! BF-SVRG) run against a [`BiFidelityOracle`] that supplies cheap LOW and
//! expensive HIGH fidelity gradients. Everything numeric is generic over
//! [`Real`]; the aliases below fix the scalar to `f64`.

pub mod cost;
pub mod cv;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod scalar;
pub mod sgd;
pub mod uncertainty;

pub use error::{Error, Result};
pub use scalar::Real;
pub use sgd::{BiFidelityOracle, DesignVector, Fidelity, OptimizerTrace, RandomRealization, RunContext};

pub type Design = sgd::DesignVector<f64>;
pub type Realization = sgd::RandomRealization<f64>;
pub type Trace = sgd::OptimizerTrace<f64>;
pub type Ledger = cost::CostLedger<f64>;
