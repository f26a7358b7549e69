use crate::error::{Error, Result};
use crate::Real;

/// Fits `log e_k ≈ a + b·k` over the trailing `tail_fraction` of the series.
/// Returns `(exp(b), R²)`. A series with no variation in the window is a
/// perfect fit.
pub fn measure_linear_rate<T: Real>(errors: &[T], tail_fraction: T) -> Result<(T, T)> {
    if !(tail_fraction > T::zero() && tail_fraction <= T::one()) {
        return Err(Error::DomainFault("tail_fraction must lie in (0, 1]".into()));
    }
    if let Some(i) = errors.iter().position(|e| !(*e > T::zero()) || !e.is_finite()) {
        return Err(Error::DomainFault(format!("error {i} is not strictly positive")));
    }
    let n = errors.len();
    let take = (T::from_count(n) * tail_fraction).ceil().to_usize().unwrap_or(n).min(n);
    if take < 3 {
        return Err(Error::InsufficientData { needed: 3, found: take });
    }
    let start = n - take;
    let xs: Vec<T> = (start..n).map(T::from_count).collect();
    let ys: Vec<T> = errors[start..].iter().map(|e| e.ln()).collect();
    let m = T::from_count(take);
    let xm = xs.iter().copied().sum::<T>() / m;
    let ym = ys.iter().copied().sum::<T>() / m;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy += (x - xm) * (y - ym);
        sxx += (x - xm) * (x - xm);
        syy += (y - ym) * (y - ym);
    }
    let slope = sxy / sxx;
    let ss_res: T = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let r = y - (ym + slope * (x - xm));
            r * r
        })
        .sum();
    let r2 = if syy <= T::epsilon() * T::epsilon() * m {
        T::one()
    } else {
        T::one() - ss_res / syy
    };
    Ok((slope.exp(), r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_geometric() {
        let e: Vec<f64> = (0..40).map(|k| 0.9f64.powi(k)).collect();
        let (rate, q) = measure_linear_rate(&e, 0.5).unwrap();
        assert!((rate - 0.9).abs() < 1e-12);
        assert!((q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series() {
        let (rate, q) = measure_linear_rate(&[2.0f64; 10], 1.0).unwrap();
        assert_eq!(rate, 1.0);
        assert_eq!(q, 1.0);
    }

    #[test]
    fn noisy_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e: Vec<f64> = (0..60)
            .map(|k| 0.8f64.powi(k) * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        let (rate, q) = measure_linear_rate(&e, 1.0).unwrap();
        assert!((0.79..=0.81).contains(&rate), "rate {rate}");
        assert!(q > 0.99);
    }

    #[test]
    fn rejects_short_or_bad_input() {
        assert_eq!(
            measure_linear_rate(&[1.0f64, 0.5, 0.25, 0.1], 0.5),
            Err(Error::InsufficientData { needed: 3, found: 2 })
        );
        assert!(measure_linear_rate(&[1.0f64, 0.0, 0.5], 1.0).is_err());
        assert!(measure_linear_rate(&[1.0f64, 0.5, 0.2], 0.0).is_err());
    }
}
