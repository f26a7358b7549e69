use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::sgd::oracle::{draw_realizations, mean_vector};
use crate::sgd::trace::Recorder;
use crate::sgd::{BiFidelityOracle, DesignVector, Fidelity, OptimizerTrace, RunContext};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrgConfig<T> {
    pub eta: T,
    pub outer: usize,
    /// Inner iterations per anchor, `m`.
    pub inner: usize,
    /// Realizations in the anchor mean.
    pub n_h: usize,
    /// Anchor members picked per inner step (1 in the classical method).
    pub batch: usize,
}

/// SVRG. Each inner step picks `batch` anchor members `t` and moves along
/// `h(θ_k;ξ_t) − h(θ_prev;ξ_t) + ĥ(θ_prev)`, costing two HIGH calls per member.
///
/// Records are written per inner step, so a run has `outer·inner` records.
pub fn svrg_run<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    theta0: &DesignVector<T>,
    cfg: &SvrgConfig<T>,
    ctx: &mut RunContext<'_, T>,
) -> Result<OptimizerTrace<T>> {
    if !(cfg.eta > T::zero()) {
        return Err(Error::ConfigFault("learning rate eta must be positive".into()));
    }
    if cfg.inner == 0 || cfg.n_h == 0 || cfg.batch == 0 {
        return Err(Error::ConfigFault("m, N_h and batch must all be at least 1".into()));
    }
    if cfg.batch > cfg.n_h {
        return Err(Error::ConfigFault(format!(
            "batch {} exceeds the anchor size N_h = {}",
            cfg.batch, cfg.n_h
        )));
    }
    let seed = ctx.seed;
    let mut rec = Recorder::start(ctx, oracle.gamma(), cfg.outer * cfg.inner, theta0)?;
    let mut theta = theta0.values.clone();
    let mut step = 0usize;
    for j in 0..cfg.outer {
        let theta_prev = theta.clone();
        let anchor = draw_realizations(oracle, seed, Purpose::Anchor, j as u64, cfg.n_h);
        let h_bar = mean_vector(&oracle.grad_batch(&theta_prev, &anchor, Fidelity::High)?);
        rec.ledger.charge_high(cfg.n_h);
        for _ in 0..cfg.inner {
            step += 1;
            let picks = index::sample(&mut stream(seed, Purpose::Indices, step as u64, 0), cfg.n_h, cfg.batch);
            let xis: Vec<_> = picks.iter().map(|t| anchor[t].clone()).collect();
            let now = mean_vector(&oracle.grad_batch(&theta, &xis, Fidelity::High)?);
            let then = mean_vector(&oracle.grad_batch(&theta_prev, &xis, Fidelity::High)?);
            rec.ledger.charge_high(2 * cfg.batch);
            for (i, t) in theta.iter_mut().enumerate() {
                *t -= cfg.eta * (now[i] - then[i] + h_bar[i]);
            }
            theta0.project(&mut theta);
            rec.step(&theta)?;
        }
    }
    Ok(rec.finish(theta))
}
