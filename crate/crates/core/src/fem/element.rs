use crate::error::{Error, Result};
use crate::Real;

pub type ElementMatrix<T> = [[T; 8]; 8];

/// Unit-modulus, unit-thickness plane-stress stiffness of a square bilinear
/// element, integrated with 2×2 Gauss points. Independent of element size.
pub fn element_stiffness<T: Real>(nu: T) -> Result<ElementMatrix<T>> {
    if !(nu >= T::zero() && nu < T::lit(0.5)) {
        return Err(Error::DomainFault(format!("Poisson ratio {nu} outside [0, 0.5)")));
    }
    let one = T::one();
    let c = one / (one - nu * nu);
    let d = [[c, c * nu, T::zero()], [c * nu, c, T::zero()], [T::zero(), T::zero(), c * (one - nu) / T::lit(2.0)]];
    // Local nodes in (ξ, η) ∈ [-1,1]²; the element maps to [0,1]², so
    // ∂/∂x = 2∂/∂ξ and det J = 1/4.
    let corners = [(-one, -one), (one, -one), (one, one), (-one, one)];
    let g = one / T::lit(3.0).sqrt();
    let mut k = [[T::zero(); 8]; 8];
    for &(xi, eta) in &[(-g, -g), (g, -g), (g, g), (-g, g)] {
        let mut b = [[T::zero(); 8]; 3];
        for (a, &(xa, ya)) in corners.iter().enumerate() {
            let q = T::lit(0.25);
            let dx = q * xa * (one + ya * eta) * T::lit(2.0);
            let dy = q * ya * (one + xa * xi) * T::lit(2.0);
            b[0][2 * a] = dx;
            b[1][2 * a + 1] = dy;
            b[2][2 * a] = dy;
            b[2][2 * a + 1] = dx;
        }
        let w = T::lit(0.25);
        for i in 0..8 {
            for j in i..8 {
                let mut s = T::zero();
                for p in 0..3 {
                    for q in 0..3 {
                        s += b[p][i] * d[p][q] * b[q][j];
                    }
                }
                k[i][j] += w * s;
            }
        }
    }
    for i in 0..8 {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    Ok(k)
}

/// `ρ^β · E0`.
pub fn simp_modulus<T: Real>(rho: T, beta_p: T, e0: T) -> Result<T> {
    if !(rho > T::zero() && rho <= T::one()) {
        return Err(Error::DomainFault(format!("density {rho} outside (0, 1]")));
    }
    Ok(rho.powf(beta_p) * e0)
}
