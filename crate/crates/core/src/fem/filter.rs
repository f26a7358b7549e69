use crate::error::{check_len, Result};
use crate::fem::StructuredMesh;
use crate::Real;

/// Linear density filter `ρ_e = Σ_i H_ei θ_i / Σ_i H_ei`, `H_ei = max(0, r_f − d_ei)`.
#[derive(Debug, Clone)]
pub struct FilterKernel<T> {
    pub r_f: T,
    /// Per element: neighbors with raw weights `H_ei > 0`.
    neighbors: Vec<Vec<(usize, T)>>,
    norms: Vec<T>,
}

impl<T: Real> FilterKernel<T> {
    /// `r_f` is in length units.
    pub fn new(mesh: &StructuredMesh<T>, r_f: T) -> Self {
        let h = mesh.element_size;
        let reach = (r_f / h).ceil().to_usize().unwrap_or(0);
        let mut neighbors = Vec::with_capacity(mesh.n_elements());
        let mut norms = Vec::with_capacity(mesh.n_elements());
        for e in 0..mesh.n_elements() {
            let (ex, ey) = mesh.element_coords(e);
            let mut row = Vec::new();
            let mut sum = T::zero();
            for ix in ex.saturating_sub(reach)..=(ex + reach).min(mesh.nelx - 1) {
                for iy in ey.saturating_sub(reach)..=(ey + reach).min(mesh.nely - 1) {
                    let dx = T::from_count(ix.abs_diff(ex)) * h;
                    let dy = T::from_count(iy.abs_diff(ey)) * h;
                    let w = r_f - (dx * dx + dy * dy).sqrt();
                    if w > T::zero() {
                        row.push((mesh.element(ix, iy), w));
                        sum += w;
                    }
                }
            }
            neighbors.push(row);
            norms.push(sum);
        }
        Self { r_f, neighbors, norms }
    }

    /// Filter radius of `factor` element widths.
    pub fn with_widths(mesh: &StructuredMesh<T>, factor: T) -> Self {
        Self::new(mesh, factor * mesh.element_size)
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn neighbors(&self, e: usize) -> &[(usize, T)] {
        &self.neighbors[e]
    }

    pub fn norm(&self, e: usize) -> T {
        self.norms[e]
    }

    /// `F θ`
    pub fn apply(&self, theta: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), theta.len())?;
        Ok(self
            .neighbors
            .iter()
            .zip(&self.norms)
            .map(|(row, &s)| row.iter().map(|&(i, w)| w * theta[i]).sum::<T>() / s)
            .collect())
    }

    /// `Fᵀ v`, used for chain-rule sensitivities.
    pub fn apply_transpose(&self, v: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), v.len())?;
        let mut out = vec![T::zero(); v.len()];
        for (e, (row, &s)) in self.neighbors.iter().zip(&self.norms).enumerate() {
            let ve = v[e] / s;
            for &(i, w) in row {
                out[i] += w * ve;
            }
        }
        Ok(out)
    }
}

/// Filtered densities of a design.
pub fn density_filter<T: Real>(kernel: &FilterKernel<T>, theta: &[T]) -> Result<Vec<T>> {
    kernel.apply(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row3() -> (StructuredMesh<f64>, FilterKernel<f64>) {
        let m = StructuredMesh::unit(3, 1).unwrap();
        let k = FilterKernel::new(&m, 1.5);
        (m, k)
    }

    #[test]
    fn three_element_row_by_hand() {
        let (_, k) = row3();
        let rho = density_filter(&k, &[0.0, 1.0, 0.0]).unwrap();
        assert!((rho[1] - 0.6).abs() < 1e-15);
        assert!((rho[0] - 0.25).abs() < 1e-15);
        let ft1 = k.apply_transpose(&[1.0, 1.0, 1.0]).unwrap();
        for (a, b) in ft1.iter().zip([0.95, 1.1, 0.95]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn small_radius_is_identity() {
        let m = StructuredMesh::unit(4, 3).unwrap();
        let k = FilterKernel::new(&m, 0.9);
        let theta: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        for (a, b) in density_filter(&k, &theta).unwrap().iter().zip(&theta) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    proptest! {
        #[test]
        fn convex_combination(theta in prop::collection::vec(0.0f64..1.0, 20), c in -3.0f64..3.0) {
            let m = StructuredMesh::unit(5, 4).unwrap();
            let k = FilterKernel::with_widths(&m, 1.5);
            let rho = k.apply(&theta).unwrap();
            let (lo, hi) = theta.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            prop_assert!(rho.iter().all(|&r| r >= lo - 1e-15 && r <= hi + 1e-15));
            let flat = k.apply(&[c; 20]).unwrap();
            prop_assert!(flat.iter().all(|&r| (r - c).abs() < 1e-14));
            // ⟨Fθ, v⟩ = ⟨θ, Fᵀv⟩
            let v: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
            let lhs: f64 = rho.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = theta.iter().zip(k.apply_transpose(&v).unwrap()).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
