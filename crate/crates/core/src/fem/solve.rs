use crate::error::{check_len, Error, Result};
use crate::fem::{ElementMatrix, StructuredMesh};
use crate::linalg::BandedSpd;
use crate::scalar::{dot, norm2};
use crate::Real;

/// Nodal forces and the constrained degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase<T> {
    pub force: Vec<T>,
    pub fixed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub u: Vec<T>,
    /// `fᵀu`
    pub compliance: T,
    pub iterations: usize,
    /// `‖Ku − f‖ / ‖f‖`
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearSolver {
    /// Banded Cholesky factorization; one factorization serves every load.
    Cholesky,
    /// Jacobi-preconditioned conjugate gradients.
    Pcg { tol: f64, max_iter: Option<usize> },
}

impl Default for LinearSolver {
    fn default() -> Self {
        LinearSolver::Cholesky
    }
}

impl LinearSolver {
    pub fn pcg() -> Self {
        LinearSolver::Pcg {
            tol: 1e-8,
            max_iter: None,
        }
    }
}

/// Accepted relative residual for any solve.
pub fn residual_tolerance<T: Real>() -> T {
    T::lit(1e-8).max(T::epsilon() * T::lit(1e3))
}

/// Assembled SIMP stiffness with constrained rows and columns replaced by
/// the identity.
#[derive(Debug, Clone)]
pub struct StiffnessSystem<T> {
    k: BandedSpd<T>,
    factor: Option<BandedSpd<T>>,
    fixed: Vec<bool>,
    solver: LinearSolver,
}

impl<T: Real> StiffnessSystem<T> {
    /// Element moduli are `ρ_e^β · E0_e` (`E0 ≡ 1` when `e_field` is absent).
    pub fn assemble(
        mesh: &StructuredMesh<T>,
        k0: &ElementMatrix<T>,
        rho: &[T],
        e_field: Option<&[T]>,
        beta_p: T,
        fixed: &[usize],
        solver: LinearSolver,
    ) -> Result<Self> {
        let ne = mesh.n_elements();
        check_len(ne, rho.len())?;
        if let Some(e0) = e_field {
            check_len(ne, e0.len())?;
        }
        if fixed.is_empty() {
            return Err(Error::SingularSystem { pivot: 0 });
        }
        let n = mesh.n_dofs();
        let mut mask = vec![false; n];
        for &d in fixed {
            if d >= n {
                return Err(Error::DimensionFault { expected: n, found: d });
            }
            mask[d] = true;
        }
        let mut k = BandedSpd::zeros(n, mesh.bandwidth());
        for e in 0..ne {
            if !(rho[e] > T::zero()) {
                return Err(Error::DomainFault(format!("density {} at element {e} is not positive", rho[e])));
            }
            let modulus = rho[e].powf(beta_p) * e_field.map_or(T::one(), |f| f[e]);
            let dofs = mesh.element_dofs(e);
            for (a, &i) in dofs.iter().enumerate() {
                if mask[i] {
                    continue;
                }
                for (b, &j) in dofs.iter().enumerate() {
                    if j <= i && !mask[j] {
                        k.add(i, j, modulus * k0[a][b]);
                    }
                }
            }
        }
        for (i, &m) in mask.iter().enumerate() {
            if m {
                k.add(i, i, T::one());
            }
        }
        let factor = match solver {
            LinearSolver::Cholesky => {
                let mut f = k.clone();
                f.factor()?;
                Some(f)
            }
            LinearSolver::Pcg { .. } => None,
        };
        Ok(Self {
            k,
            factor,
            fixed: mask,
            solver,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.fixed.len()
    }

    pub fn matrix(&self) -> &BandedSpd<T> {
        &self.k
    }

    /// Solves `K u = f` with constrained entries of `f` ignored.
    pub fn solve(&self, force: &[T]) -> Result<SolveResult<T>> {
        check_len(self.n_dofs(), force.len())?;
        let f: Vec<T> = force
            .iter()
            .zip(&self.fixed)
            .map(|(&v, &m)| if m { T::zero() } else { v })
            .collect();
        let fnorm = norm2(&f);
        if fnorm == T::zero() {
            return Ok(SolveResult {
                u: vec![T::zero(); f.len()],
                compliance: T::zero(),
                iterations: 0,
                residual: T::zero(),
            });
        }
        let (u, iterations) = match (&self.factor, self.solver) {
            (Some(fac), _) => (fac.solve(&f), 1),
            (None, LinearSolver::Pcg { tol, max_iter }) => {
                let cap = max_iter.unwrap_or(10 * f.len());
                self.pcg(&f, T::lit(tol), cap)?
            }
            (None, LinearSolver::Cholesky) => unreachable!("Cholesky systems are factored at assembly"),
        };
        let ku = self.k.mul_vec(&u);
        let r: Vec<T> = ku.iter().zip(&f).map(|(&a, &b)| a - b).collect();
        let residual = norm2(&r) / fnorm;
        if !(residual <= residual_tolerance()) {
            return Err(Error::SolverDivergence {
                iterations,
                residual: residual.as_f64(),
                xi: None,
            });
        }
        Ok(SolveResult {
            compliance: dot(&f, &u),
            u,
            iterations,
            residual,
        })
    }

    fn pcg(&self, f: &[T], tol: T, cap: usize) -> Result<(Vec<T>, usize)> {
        let n = f.len();
        let inv_d: Vec<T> = (0..n).map(|i| T::one() / self.k.get(i, i)).collect();
        let mut x = vec![T::zero(); n];
        let mut r = f.to_vec();
        let mut z: Vec<T> = r.iter().zip(&inv_d).map(|(&a, &b)| a * b).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let fnorm = norm2(f);
        for it in 1..=cap {
            let ap = self.k.mul_vec(&p);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rel = norm2(&r) / fnorm;
            if !rel.is_finite() {
                break;
            }
            if rel <= tol {
                return Ok((x, it));
            }
            for i in 0..n {
                z[i] = r[i] * inv_d[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::SolverDivergence {
            iterations: cap,
            residual: (norm2(&r) / fnorm).as_f64(),
            xi: None,
        })
    }
}

/// Assembles `K(ρ)` for one load case and solves it with a banded Cholesky
/// factorization.
pub fn assemble_and_solve<T: Real>(
    mesh: &StructuredMesh<T>,
    k0: &ElementMatrix<T>,
    rho: &[T],
    e_field: Option<&[T]>,
    load: &LoadCase<T>,
    beta_p: T,
) -> Result<SolveResult<T>> {
    StiffnessSystem::assemble(mesh, k0, rho, e_field, beta_p, &load.fixed, LinearSolver::Cholesky)?.solve(&load.force)
}
