use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::scalar::{dist2, first_non_finite};
use crate::sgd::DesignVector;
use crate::Real;

/// Designs at or below this size are snapshotted in full.
pub const SNAPSHOT_LIMIT: usize = 64;

/// Objective estimate reported by a [`Monitor`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation<T> {
    pub objective: Option<T>,
    pub mass_ratio: Option<T>,
}

/// Evaluates the current design for reporting. Never influences the iterates.
pub trait Monitor<T> {
    fn observe(&mut self, iter: usize, theta: &[T]) -> Result<Observation<T>>;
}

impl<T, F> Monitor<T> for F
where
    F: FnMut(usize, &[T]) -> Result<Observation<T>>,
{
    fn observe(&mut self, iter: usize, theta: &[T]) -> Result<Observation<T>> {
        self(iter, theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub iter: usize,
    pub objective: Option<T>,
    pub mass_ratio: Option<T>,
    pub cum_cost: T,
    pub high_calls: u64,
    pub low_calls: u64,
    /// Full design, kept only for small problems.
    pub theta: Option<Vec<T>>,
    /// `‖θ − θ_ref‖₂` when a reference was supplied.
    pub dist_to_ref: Option<T>,
    /// Control-variate coefficient fell back to identity on this step.
    pub alpha_fallback: bool,
    /// Directions whose coefficient was zeroed as degenerate.
    pub degenerate_alpha: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
}

/// Per-iteration history of one optimizer run. `records[k]` describes the
/// design after update `k + 1`; `initial` describes the starting design.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerTrace<T> {
    pub initial: Record<T>,
    pub records: Vec<Record<T>>,
    pub status: Status,
    pub theta: Vec<T>,
}

impl<T: Real> OptimizerTrace<T> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> &Record<T> {
        self.records.last().unwrap_or(&self.initial)
    }

    /// Initial record followed by every iteration.
    pub fn all_records(&self) -> impl Iterator<Item = &Record<T>> {
        std::iter::once(&self.initial).chain(&self.records)
    }

    pub fn objectives(&self) -> Vec<Option<T>> {
        self.records.iter().map(|r| r.objective).collect()
    }
}

/// Options shared by every optimizer.
pub struct RunContext<'a, T> {
    pub seed: u64,
    pub monitor: Option<&'a mut dyn Monitor<T>>,
    pub reference: Option<&'a [T]>,
    /// The monitor runs on iterations divisible by this, and on the last one.
    pub record_every: usize,
}

impl<'a, T: Real> RunContext<'a, T> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            monitor: None,
            reference: None,
            record_every: 1,
        }
    }

    pub fn with_monitor(mut self, monitor: &'a mut dyn Monitor<T>) -> Self {
        self.monitor = Some(monitor);
        self
    }

    pub fn with_reference(mut self, reference: &'a [T]) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn every(mut self, k: usize) -> Self {
        self.record_every = k.max(1);
        self
    }
}

/// Builds the trace as an optimizer advances.
pub(crate) struct Recorder<'c, 'a, T> {
    ctx: &'c mut RunContext<'a, T>,
    total: usize,
    pub ledger: CostLedger<T>,
    initial: Option<Record<T>>,
    records: Vec<Record<T>>,
}

impl<'c, 'a, T: Real> Recorder<'c, 'a, T> {
    pub fn start(ctx: &'c mut RunContext<'a, T>, gamma: T, total: usize, theta0: &DesignVector<T>) -> Result<Self> {
        if let Some(index) = first_non_finite(&theta0.values) {
            return Err(Error::NumericalFault { index });
        }
        let mut r = Self {
            ctx,
            total,
            ledger: CostLedger::new(gamma),
            initial: None,
            records: Vec::with_capacity(total),
        };
        let rec = r.make(0, &theta0.values, false, 0)?;
        r.initial = Some(rec);
        Ok(r)
    }

    fn make(&mut self, iter: usize, theta: &[T], alpha_fallback: bool, degenerate_alpha: usize) -> Result<Record<T>> {
        let due = iter % self.ctx.record_every == 0 || iter == self.total;
        let obs = match (&mut self.ctx.monitor, due) {
            (Some(m), true) => m.observe(iter, theta)?,
            _ => Observation::default(),
        };
        Ok(Record {
            iter,
            objective: obs.objective,
            mass_ratio: obs.mass_ratio,
            cum_cost: self.ledger.cumulative(),
            high_calls: self.ledger.high_calls,
            low_calls: self.ledger.low_calls,
            theta: (theta.len() <= SNAPSHOT_LIMIT).then(|| theta.to_vec()),
            dist_to_ref: self.ctx.reference.map(|r| dist2(theta, r)),
            alpha_fallback,
            degenerate_alpha,
        })
    }

    /// Validates the new iterate and appends its record.
    pub fn step(&mut self, theta: &[T]) -> Result<()> {
        self.step_flagged(theta, false, 0)
    }

    pub fn step_flagged(&mut self, theta: &[T], alpha_fallback: bool, degenerate_alpha: usize) -> Result<()> {
        if let Some(index) = first_non_finite(theta) {
            return Err(Error::NumericalFault { index });
        }
        let iter = self.records.len() + 1;
        let rec = self.make(iter, theta, alpha_fallback, degenerate_alpha)?;
        self.records.push(rec);
        Ok(())
    }

    pub fn finish(self, theta: Vec<T>) -> OptimizerTrace<T> {
        OptimizerTrace {
            initial: self.initial.expect("initial record"),
            records: self.records,
            status: Status::Completed,
            theta,
        }
    }
}
