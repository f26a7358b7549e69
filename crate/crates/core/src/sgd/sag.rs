use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::sgd::oracle::draw_realizations;
use crate::sgd::trace::Recorder;
use crate::sgd::{BiFidelityOracle, DesignVector, Fidelity, OptimizerTrace, RandomRealization, RunContext, SagGradientTable};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SagConfig<T> {
    pub eta: T,
    pub iters: usize,
    /// Size of the fixed realization set.
    pub n: usize,
    /// Table entries refreshed per iteration.
    pub n_h: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfSagConfig<T> {
    pub eta: T,
    pub iters: usize,
    pub n: usize,
    /// Entries refreshed with LOW-fidelity gradients per iteration.
    pub n_l: usize,
    /// Entries refreshed with HIGH-fidelity gradients per iteration.
    pub n_h: usize,
}

/// The fixed set of `n` realizations: the oracle's own population when it
/// has one, otherwise `n` seeded draws.
pub fn realization_pool<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    n: usize,
    seed: u64,
) -> Result<Vec<RandomRealization<T>>> {
    match oracle.population() {
        Some(pop) if pop.len() >= n => Ok(pop[..n].to_vec()),
        Some(pop) => Err(Error::ConfigFault(format!(
            "N = {n} exceeds the {} realizations the problem provides",
            pop.len()
        ))),
        None => Ok(draw_realizations(oracle, seed, Purpose::Pool, 0, n)
            .into_iter()
            .enumerate()
            .map(|(i, r)| RandomRealization { index: Some(i), ..r })
            .collect()),
    }
}

/// Distinct table indices for iteration `k`; shared by SAG and BF-SAG so the
/// two coincide when the fidelities do.
pub fn table_indices(seed: u64, k: usize, n: usize, amount: usize) -> Vec<usize> {
    index::sample(&mut stream(seed, Purpose::Indices, k as u64, 0), n, amount).into_vec()
}

/// Batch SAG refreshing `n_h` entries with HIGH-fidelity gradients.
pub fn sag_run<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    theta0: &DesignVector<T>,
    cfg: &SagConfig<T>,
    ctx: &mut RunContext<'_, T>,
) -> Result<OptimizerTrace<T>> {
    let bf = BfSagConfig {
        eta: cfg.eta,
        iters: cfg.iters,
        n: cfg.n,
        n_l: 0,
        n_h: cfg.n_h,
    };
    bfsag_run(oracle, theta0, &bf, ctx)
}

/// BF-SAG: each iteration refreshes `n_l` entries with LOW and `n_h` with
/// HIGH gradients at disjoint indices, then steps along the table mean.
pub fn bfsag_run<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    theta0: &DesignVector<T>,
    cfg: &BfSagConfig<T>,
    ctx: &mut RunContext<'_, T>,
) -> Result<OptimizerTrace<T>> {
    if !(cfg.eta > T::zero()) {
        return Err(Error::ConfigFault("learning rate eta must be positive".into()));
    }
    let batch = cfg.n_l + cfg.n_h;
    if batch == 0 {
        return Err(Error::ConfigFault("at least one table entry must be refreshed per iteration".into()));
    }
    if batch > cfg.n {
        return Err(Error::ConfigFault(format!(
            "N_l + N_h = {batch} exceeds the table size N = {}",
            cfg.n
        )));
    }
    let seed = ctx.seed;
    let pool = realization_pool(oracle, cfg.n, seed)?;
    let mut table = SagGradientTable::zeros(cfg.n, theta0.len());
    let mut rec = Recorder::start(ctx, oracle.gamma(), cfg.iters, theta0)?;
    let mut theta = theta0.values.clone();
    let scale = cfg.eta / T::from_count(cfg.n);
    for k in 1..=cfg.iters {
        let idx = table_indices(seed, k, cfg.n, batch);
        let (low_idx, high_idx) = idx.split_at(cfg.n_l);
        let pick = |ids: &[usize]| ids.iter().map(|&i| pool[i].clone()).collect::<Vec<_>>();
        let low = if low_idx.is_empty() {
            vec![]
        } else {
            oracle.grad_batch(&theta, &pick(low_idx), Fidelity::Low)?
        };
        let high = if high_idx.is_empty() {
            vec![]
        } else {
            oracle.grad_batch(&theta, &pick(high_idx), Fidelity::High)?
        };
        rec.ledger.charge_low(low.len());
        rec.ledger.charge_high(high.len());
        for (&i, g) in idx.iter().zip(low.into_iter().chain(high)) {
            table.replace(i, g)?;
        }
        for (t, &s) in theta.iter_mut().zip(table.sum()) {
            *t -= scale * s;
        }
        theta0.project(&mut theta);
        rec.step(&theta)?;
    }
    Ok(rec.finish(theta))
}
