use crate::error::{Error, Result};
use crate::Real;

/// Point-load magnitude `P(ξ) = P0 (1 + ξ/2)`, `ξ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadMagnitudeModel<T> {
    pub p0: T,
}

impl<T: Real> LoadMagnitudeModel<T> {
    pub fn new(p0: T) -> Result<Self> {
        if !(p0 > T::zero()) {
            return Err(Error::DomainFault(format!("load scale P0 = {p0} must be positive")));
        }
        Ok(Self { p0 })
    }
}

/// Load angle `φ = π/4 + ξ_φ`, `ξ_φ ∈ [−π/8, π/8]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadDirectionModel<T> {
    pub mean: T,
    pub half_width: T,
}

impl<T: Real> Default for LoadDirectionModel<T> {
    fn default() -> Self {
        Self {
            mean: T::FRAC_PI_4(),
            half_width: T::FRAC_PI_8(),
        }
    }
}

pub fn sample_load<T: Real>(model: &LoadMagnitudeModel<T>, xi: T) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::one()) {
        return Err(Error::DomainFault(format!("load variable {xi} outside [0, 1]")));
    }
    Ok(model.p0 * (T::one() + T::lit(0.5) * xi))
}

pub fn sample_direction<T: Real>(model: &LoadDirectionModel<T>, xi_phi: T) -> Result<T> {
    if !(xi_phi.abs() <= model.half_width) {
        return Err(Error::DomainFault(format!(
            "angle variable {xi_phi} outside [-{w}, {w}]",
            w = model.half_width
        )));
    }
    Ok(model.mean + xi_phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn magnitude() {
        let m = LoadMagnitudeModel::new(2.0).unwrap();
        assert_eq!(sample_load(&m, 0.0).unwrap(), 2.0);
        assert_eq!(sample_load(&m, 1.0).unwrap(), 3.0);
        assert_eq!(sample_load(&LoadMagnitudeModel::new(1.0).unwrap(), 0.5).unwrap(), 1.25);
        assert!(sample_load(&m, 1.5).is_err());
        assert!(LoadMagnitudeModel::new(0.0).is_err());
    }

    #[test]
    fn direction() {
        let d = LoadDirectionModel::<f64>::default();
        assert_eq!(sample_direction(&d, 0.0).unwrap(), PI / 4.0);
        assert!((sample_direction(&d, -PI / 8.0).unwrap() - PI / 8.0).abs() < 1e-15);
        assert!((sample_direction(&d, PI / 8.0).unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!(sample_direction(&d, 0.5).is_err());
    }
}
