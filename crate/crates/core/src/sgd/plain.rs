use crate::error::{Error, Result};
use crate::rng::Purpose;
use crate::sgd::oracle::{draw_realizations, mean_vector};
use crate::sgd::trace::Recorder;
use crate::sgd::{BiFidelityOracle, DesignVector, Fidelity, OptimizerTrace, RunContext};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig<T> {
    pub eta: T,
    pub iters: usize,
    pub batch: usize,
}

/// Mini-batch SGD on HIGH-fidelity gradients: `θ ← θ − η·mean_b h(θ; ξ_b)`.
pub fn sgd_run<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    theta0: &DesignVector<T>,
    cfg: &SgdConfig<T>,
    ctx: &mut RunContext<'_, T>,
) -> Result<OptimizerTrace<T>> {
    if !(cfg.eta > T::zero()) {
        return Err(Error::ConfigFault("learning rate eta must be positive".into()));
    }
    if cfg.batch == 0 {
        return Err(Error::ConfigFault("batch must be at least 1".into()));
    }
    let seed = ctx.seed;
    let mut rec = Recorder::start(ctx, oracle.gamma(), cfg.iters, theta0)?;
    let mut theta = theta0.values.clone();
    for k in 1..=cfg.iters {
        let xis = draw_realizations(oracle, seed, Purpose::Inner, k as u64, cfg.batch);
        let h = mean_vector(&oracle.grad_batch(&theta, &xis, Fidelity::High)?);
        rec.ledger.charge_high(cfg.batch);
        for (t, g) in theta.iter_mut().zip(&h) {
            *t -= cfg.eta * *g;
        }
        theta0.project(&mut theta);
        rec.step(&theta)?;
    }
    Ok(rec.finish(theta))
}
