use crate::error::{check_len, Error, Result};
use crate::fem::{ElementMatrix, FilterKernel, SolveResult, StructuredMesh};
use crate::Real;

/// Design variables with their filtered densities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField<T> {
    pub theta: Vec<T>,
    pub rho: Vec<T>,
}

impl<T: Real> DensityField<T> {
    pub fn new(kernel: &FilterKernel<T>, theta: Vec<T>) -> Result<Self> {
        let rho = kernel.apply(&theta)?;
        Ok(Self { theta, rho })
    }
}

/// `u_eᵀ k0 u_e` for every element.
pub fn element_energies<T: Real>(mesh: &StructuredMesh<T>, k0: &ElementMatrix<T>, u: &[T]) -> Result<Vec<T>> {
    check_len(mesh.n_dofs(), u.len())?;
    Ok((0..mesh.n_elements())
        .map(|e| bilinear(k0, mesh, e, u, u))
        .collect())
}

/// `u_eᵀ k0 w_e` for one element.
#[inline]
pub fn bilinear<T: Real>(k0: &ElementMatrix<T>, mesh: &StructuredMesh<T>, e: usize, u: &[T], w: &[T]) -> T {
    let dofs = mesh.element_dofs(e);
    let mut s = T::zero();
    for a in 0..8 {
        let ua = u[dofs[a]];
        if ua == T::zero() {
            continue;
        }
        let mut row = T::zero();
        for b in 0..8 {
            row += k0[a][b] * w[dofs[b]];
        }
        s += ua * row;
    }
    s
}

/// `−β ρ_e^{β−1} E0_e · energy_e`, the compliance derivative with respect to
/// each filtered density. Non-positive whenever the energies are.
pub fn element_sensitivities<T: Real>(rho: &[T], energy: &[T], beta_p: T, e_field: Option<&[T]>) -> Vec<T> {
    rho.iter()
        .zip(energy)
        .enumerate()
        .map(|(e, (&r, &w))| -beta_p * r.powf(beta_p - T::one()) * e_field.map_or(T::one(), |f| f[e]) * w)
        .collect()
}

/// `∂(fᵀu)/∂θ = Fᵀ [−β ρ_e^{β−1} E0_e u_eᵀ k0 u_e]_e`.
pub fn compliance_gradient<T: Real>(
    mesh: &StructuredMesh<T>,
    k0: &ElementMatrix<T>,
    kernel: &FilterKernel<T>,
    field: &DensityField<T>,
    solve: &SolveResult<T>,
    beta_p: T,
    e_field: Option<&[T]>,
) -> Result<Vec<T>> {
    let energy = element_energies(mesh, k0, &solve.u)?;
    kernel.apply_transpose(&element_sensitivities(&field.rho, &energy, beta_p, e_field))
}

/// `∂(λ Σ v_i ρ_i)/∂θ = λ Fᵀ v`.
pub fn mass_gradient<T: Real>(mesh: &StructuredMesh<T>, kernel: &FilterKernel<T>, lambda: T) -> Result<Vec<T>> {
    if !(lambda >= T::zero()) {
        return Err(Error::DomainFault("mass weight must be non-negative".into()));
    }
    let v: Vec<T> = mesh.volumes().into_iter().map(|x| x * lambda).collect();
    kernel.apply_transpose(&v)
}

/// `Σ v_i ρ_i / Σ v_i`
pub fn mass_ratio<T: Real>(mesh: &StructuredMesh<T>, rho: &[T]) -> T {
    rho.iter().copied().sum::<T>() / T::from_count(mesh.n_elements())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_and_solve, element_stiffness, LoadCase};
    use rand::{Rng, SeedableRng};

    fn mbb(mesh: &StructuredMesh<f64>, p: f64) -> LoadCase<f64> {
        let mut fixed: Vec<usize> = (0..=mesh.nely).map(|iy| 2 * mesh.node(0, iy)).collect();
        fixed.push(2 * mesh.node(mesh.nelx, 0) + 1);
        let mut force = vec![0.0; mesh.n_dofs()];
        force[2 * mesh.node(0, mesh.nely) + 1] = -p;
        LoadCase { force, fixed }
    }

    fn compliance(mesh: &StructuredMesh<f64>, kernel: &FilterKernel<f64>, theta: &[f64], load: &LoadCase<f64>) -> f64 {
        let k0 = element_stiffness(0.3).unwrap();
        let rho = kernel.apply(theta).unwrap();
        assemble_and_solve(mesh, &k0, &rho, None, load, 3.0).unwrap().compliance
    }

    #[test]
    fn adjoint_gradient_matches_central_differences() {
        let mesh = StructuredMesh::unit(12, 4).unwrap();
        let kernel = FilterKernel::with_widths(&mesh, 1.5);
        let k0 = element_stiffness(0.3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let theta: Vec<f64> = (0..48).map(|_| rng.random_range(0.2..1.0)).collect();
        let load = mbb(&mesh, 1.3);
        let field = DensityField::new(&kernel, theta.clone()).unwrap();
        let sol = assemble_and_solve(&mesh, &k0, &field.rho, None, &load, 3.0).unwrap();
        let g = compliance_gradient(&mesh, &k0, &kernel, &field, &sol, 3.0, None).unwrap();
        let h = 1e-6;
        for i in 0..48 {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[i] += h;
            tm[i] -= h;
            let fd = (compliance(&mesh, &kernel, &tp, &load) - compliance(&mesh, &kernel, &tm, &load)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs(), "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn compliance_sensitivities_are_non_positive() {
        let mesh = StructuredMesh::unit(12, 4).unwrap();
        let kernel = FilterKernel::with_widths(&mesh, 1.5);
        let k0 = element_stiffness(0.3).unwrap();
        let field = DensityField::new(&kernel, vec![0.5; 48]).unwrap();
        let sol = assemble_and_solve(&mesh, &k0, &field.rho, None, &mbb(&mesh, 1.0), 3.0).unwrap();
        let energy = element_energies(&mesh, &k0, &sol.u).unwrap();
        assert!(energy.iter().all(|&w| w >= 0.0));
        assert!((energy.iter().map(|w| w * 0.125).sum::<f64>() - sol.compliance).abs() < 1e-10 * sol.compliance);
        let g = compliance_gradient(&mesh, &k0, &kernel, &field, &sol, 3.0, None).unwrap();
        assert!(g.iter().all(|&v| v <= 0.0));
    }

    #[test]
    fn mass_terms() {
        let mesh = StructuredMesh::unit(6, 3).unwrap();
        let kernel = FilterKernel::with_widths(&mesh, 1.5);
        let g = mass_gradient(&mesh, &kernel, 2.0).unwrap();
        assert!((g.iter().sum::<f64>() - 36.0).abs() < 1e-12);
        assert!(mass_gradient(&mesh, &kernel, -1.0).is_err());
        assert_eq!(mass_ratio(&mesh, &[0.25; 18]), 0.25);
    }
}
