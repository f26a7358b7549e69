//! Cost accounting in high-fidelity gradient units.

use crate::error::{Error, Result};
use crate::Real;

/// Running count of gradient evaluations.
///
/// The cumulative cost is always recomputed as `high + γ·low` from integer
/// counters, so it never drifts from the closed-form predictions below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostLedger<T> {
    pub gamma: T,
    pub high_calls: u64,
    pub low_calls: u64,
}

impl<T: Real> CostLedger<T> {
    pub fn new(gamma: T) -> Self {
        Self {
            gamma,
            high_calls: 0,
            low_calls: 0,
        }
    }

    pub fn charge_high(&mut self, n: usize) {
        self.high_calls += n as u64;
    }

    pub fn charge_low(&mut self, n: usize) {
        self.low_calls += n as u64;
    }

    pub fn cumulative(&self) -> T {
        T::from_u64(self.high_calls).unwrap() + self.gamma * T::from_u64(self.low_calls).unwrap()
    }
}

fn counted<T: Real>(high: usize, low: usize, gamma: T) -> T {
    T::from_count(high) + gamma * T::from_count(low)
}

/// `n_it·(n_h + γ·n_l)`.
pub fn cost_bfsag<T: Real>(n_it: usize, n_h: usize, n_l: usize, gamma: T) -> T {
    counted(n_it * n_h, n_it * n_l, gamma)
}

/// `n_oit·(γ·n_l + (γ+1)·m·n_h)`.
pub fn cost_bfsvrg<T: Real>(n_oit: usize, n_l: usize, m: usize, n_h: usize, gamma: T) -> T {
    counted(n_oit * m * n_h, n_oit * (n_l + m * n_h), gamma)
}

/// Per-iteration cost of BF-SAG relative to SAG refreshing `n_h_prime` entries.
pub fn cost_ratio_sag<T: Real>(n_h: usize, n_l: usize, gamma: T, n_h_prime: usize) -> Result<T> {
    if n_h_prime == 0 {
        return Err(Error::DomainFault("SAG batch size in the denominator is zero".into()));
    }
    Ok((T::from_count(n_h) + gamma * T::from_count(n_l)) / T::from_count(n_h_prime))
}

/// Per-outer-iteration cost of BF-SVRG relative to SVRG with anchor size
/// `n_h_prime` and inner batch `n_h_dblprime`.
pub fn cost_ratio_svrg<T: Real>(
    n_l: usize,
    m: usize,
    n_h: usize,
    gamma: T,
    n_h_prime: usize,
    n_h_dblprime: usize,
) -> Result<T> {
    let den = n_h_prime + 2 * n_h_dblprime * m;
    if den == 0 {
        return Err(Error::DomainFault("SVRG cost in the denominator is zero".into()));
    }
    let num = gamma * T::from_count(n_l) + (gamma + T::one()) * T::from_count(m * n_h);
    Ok(num / T::from_count(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(cost_bfsag(100, 5, 95, 0.096), 1412.0);
        assert_eq!(cost_bfsag(7, 5, 95, 0.0), 35.0);
        assert_eq!(cost_bfsag(7, 5, 0, 0.3), 35.0);
        assert_eq!(cost_bfsvrg(1, 20, 5, 4, 0.096), 23.84);
        assert_eq!(cost_bfsvrg(3, 20, 5, 4, 0.0), 60.0);
        assert!((cost_bfsvrg(3, 20, 0, 4, 0.25f64) - 15.0).abs() < 1e-15);
    }

    #[test]
    fn ratios() {
        assert_eq!(cost_ratio_sag(5, 7, 0.0, 5).unwrap(), 1.0);
        assert!((cost_ratio_sag(5, 5, 0.015f64, 10).unwrap() - 0.5075).abs() < 1e-15);
        assert!((cost_ratio_svrg(10, 5, 4, 0.0f64, 3, 2).unwrap() - 20.0 / 23.0).abs() < 1e-15);
        assert!(cost_ratio_sag(1, 1, 0.1, 0).is_err());
        assert!(cost_ratio_svrg(1, 0, 1, 0.1, 0, 1).is_err());
    }

    #[test]
    fn ledger_matches_closed_form() {
        let mut l = CostLedger::new(0.096);
        for _ in 0..100 {
            l.charge_high(5);
            l.charge_low(95);
        }
        assert_eq!(l.cumulative(), cost_bfsag(100, 5, 95, 0.096));
    }
}
