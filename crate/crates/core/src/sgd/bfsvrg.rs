use crate::cv::{corrected_factor, diagonal_alpha};
use crate::error::{Error, Result};
use crate::rng::Purpose;
use crate::sgd::oracle::{draw_realizations, mean_vector};
use crate::sgd::trace::Recorder;
use crate::sgd::{BiFidelityOracle, DesignVector, Fidelity, OptimizerTrace, RandomRealization, RunContext};
use crate::Real;

/// Coefficient applied to the LOW-fidelity control variate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    Identity,
    /// Per-direction covariance over variance from the inner batch.
    Diagonal,
    /// `Diagonal` shrunk by `1/(1 + N_h/N_l)` for an estimated anchor mean.
    DiagonalCorrected,
}

/// How the anchor mean `ĥ_low` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorMode {
    /// Mean of `N_l` LOW-fidelity draws.
    Sampled,
    /// Closed-form expectation from the oracle; still charged as `N_l` LOW calls.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfSvrgConfig<T> {
    pub eta: T,
    pub outer: usize,
    pub inner: usize,
    pub n_l: usize,
    pub n_h: usize,
    pub alpha_mode: AlphaMode,
    pub anchor: AnchorMode,
}

/// One BF-SVRG search direction with its diagnostic flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledDirection<T> {
    pub direction: Vec<T>,
    pub alpha: Vec<T>,
    pub fallback: bool,
    pub degenerate: usize,
}

/// `ĥ_high − α ⊙ (mean_b h_low,b − ĥ_low)` from paired HIGH/LOW gradients.
///
/// When every diagonal entry is degenerate the coefficient falls back to the
/// identity and `fallback` is set.
pub fn controlled_direction<T: Real>(
    high: &[Vec<T>],
    low: &[Vec<T>],
    low_anchor: &[T],
    mode: AlphaMode,
    shrink: T,
) -> Result<ControlledDirection<T>> {
    let h_high = mean_vector(high);
    let h_low = mean_vector(low);
    let n = h_high.len();
    let (alpha, fallback, degenerate) = match mode {
        AlphaMode::Identity => (vec![T::one(); n], false, 0),
        AlphaMode::Diagonal | AlphaMode::DiagonalCorrected => {
            let d = diagonal_alpha(high, low)?;
            let bad = d.degenerate_count();
            if n > 0 && bad == n {
                (vec![T::one(); n], true, bad)
            } else {
                let s = if mode == AlphaMode::DiagonalCorrected { shrink } else { T::one() };
                (d.alpha.iter().map(|&a| a * s).collect(), false, bad)
            }
        }
    };
    let direction = (0..n)
        .map(|i| h_high[i] - alpha[i] * (h_low[i] - low_anchor[i]))
        .collect();
    Ok(ControlledDirection {
        direction,
        alpha,
        fallback,
        degenerate,
    })
}

/// BF-SVRG. Per outer iteration the LOW anchor mean is formed at `θ_prev`;
/// each inner step draws `N_h` fresh realizations, evaluates HIGH at `θ_k`
/// and LOW at `θ_prev` on them, and steps along the controlled direction.
pub fn bfsvrg_run<T: Real, O: BiFidelityOracle<T> + ?Sized>(
    oracle: &O,
    theta0: &DesignVector<T>,
    cfg: &BfSvrgConfig<T>,
    ctx: &mut RunContext<'_, T>,
) -> Result<OptimizerTrace<T>> {
    if !(cfg.eta > T::zero()) {
        return Err(Error::ConfigFault("learning rate eta must be positive".into()));
    }
    if cfg.inner == 0 || cfg.n_h == 0 || cfg.n_l == 0 {
        return Err(Error::ConfigFault("m, N_l and N_h must all be at least 1".into()));
    }
    let shrink = match cfg.anchor {
        AnchorMode::Sampled => corrected_factor::<T>(cfg.n_h, cfg.n_l),
        AnchorMode::Exact => T::one(),
    };
    let seed = ctx.seed;
    let mut rec = Recorder::start(ctx, oracle.gamma(), cfg.outer * cfg.inner, theta0)?;
    let mut theta = theta0.values.clone();
    let mut step = 0usize;
    for j in 0..cfg.outer {
        let theta_prev = theta.clone();
        let low_anchor = match cfg.anchor {
            AnchorMode::Sampled => {
                let xis = draw_realizations(oracle, seed, Purpose::Anchor, j as u64, cfg.n_l);
                mean_vector(&oracle.grad_batch(&theta_prev, &xis, Fidelity::Low)?)
            }
            AnchorMode::Exact => oracle.exact_mean_grad(&theta_prev, Fidelity::Low).ok_or_else(|| {
                Error::ConfigFault("the problem has no closed-form mean gradient for an exact anchor".into())
            })??,
        };
        rec.ledger.charge_low(cfg.n_l);
        for _ in 0..cfg.inner {
            step += 1;
            let xis: Vec<RandomRealization<T>> = draw_realizations(oracle, seed, Purpose::Inner, step as u64, cfg.n_h);
            let high = oracle.grad_batch(&theta, &xis, Fidelity::High)?;
            let low = oracle.grad_batch(&theta_prev, &xis, Fidelity::Low)?;
            rec.ledger.charge_high(cfg.n_h);
            rec.ledger.charge_low(cfg.n_h);
            let d = controlled_direction(&high, &low, &low_anchor, cfg.alpha_mode, shrink)?;
            for (t, g) in theta.iter_mut().zip(&d.direction) {
                *t -= cfg.eta * *g;
            }
            theta0.project(&mut theta);
            rec.step_flagged(&theta, d.fallback, d.degenerate)?;
        }
    }
    Ok(rec.finish(theta))
}
