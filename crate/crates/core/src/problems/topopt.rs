//! SIMP compliance-plus-mass minimization of the half MBB beam under
//! uncertain loading (variants a, b) or an uncertain lognormal modulus (c).
//!
//! HIGH gradients come from the fine mesh. LOW gradients restrict the design
//! to a mesh with half the resolution, solve there and prolong the element
//! sensitivities back with a cubic spline.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::fem::{
    bilinear, element_sensitivities, element_stiffness, mass_gradient, mass_ratio, prolong, restrict, ElementMatrix,
    FilterKernel, LinearSolver, StiffnessSystem, StructuredMesh,
};
use crate::scalar::dot;
use crate::sgd::{BiFidelityOracle, DesignVector, Fidelity, RandomRealization};
use crate::uncertainty::{
    build_kl_grid, sample_direction, sample_load, CovarianceSpec, KLField, LoadDirectionModel, LoadMagnitudeModel,
};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopOptVariant {
    /// Uncertain load magnitude at the top-left corner.
    A,
    /// Adds a second load of uncertain direction at `x = L/8`.
    B,
    /// Uncertain magnitude plus a lognormal modulus field.
    C,
}

impl TopOptVariant {
    pub fn default_lambda(self) -> f64 {
        match self {
            TopOptVariant::A => 1.0,
            TopOptVariant::B | TopOptVariant::C => 0.25,
        }
    }
}

/// Problem parameters; the fine mesh uses unit elements.
#[derive(Debug, Clone, PartialEq)]
pub struct TopOptSpec<T> {
    pub variant: TopOptVariant,
    pub nelx: usize,
    pub nely: usize,
    pub lambda: T,
    pub gamma: T,
    pub beta_p: T,
    pub nu: T,
    /// Filter radius in element widths of the respective mesh.
    pub filter_widths: T,
    pub p0: T,
    pub theta_min: T,
    pub theta0: T,
    pub kl_sigma: T,
    /// Correlation length; `None` means a fortieth of the full beam length.
    pub kl_length: Option<T>,
    pub kl_modes: usize,
    pub solver: LinearSolver,
}

impl<T: Real> TopOptSpec<T> {
    /// 120×40 fine mesh with the standard parameters of each variant.
    pub fn new(variant: TopOptVariant) -> Self {
        Self {
            variant,
            nelx: 120,
            nely: 40,
            lambda: T::lit(variant.default_lambda()),
            gamma: T::lit(0.096),
            beta_p: T::lit(3.0),
            nu: T::lit(0.3),
            filter_widths: T::lit(1.5),
            p0: T::one(),
            theta_min: T::lit(1e-3),
            theta0: T::lit(0.5),
            kl_sigma: T::lit(2.0),
            kl_length: None,
            kl_modes: 100,
            solver: LinearSolver::Cholesky,
        }
    }

    /// 60×20 fine mesh.
    pub fn desk(variant: TopOptVariant) -> Self {
        Self {
            nelx: 60,
            nely: 20,
            ..Self::new(variant)
        }
    }

    /// Full beam length `L`; the modeled half is `L/2 × L/6`.
    pub fn beam_length(&self) -> T {
        T::from_count(2 * self.nelx)
    }

    pub fn correlation_length(&self) -> T {
        self.kl_length.unwrap_or_else(|| self.beam_length() / T::lit(40.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigFault(m));
        if self.nelx < 2 || self.nely < 2 || self.nelx % 2 != 0 || self.nely % 2 != 0 {
            return bad(format!("fine mesh {}x{} must have even dimensions >= 2", self.nelx, self.nely));
        }
        if !(self.lambda >= T::zero()) {
            return bad(format!("mass weight lambda = {} must be >= 0", self.lambda));
        }
        if !(self.gamma >= T::zero()) {
            return bad(format!("gamma = {} must be >= 0", self.gamma));
        }
        if !(self.beta_p >= T::one()) {
            return bad(format!("penalization exponent {} must be >= 1", self.beta_p));
        }
        if !(self.filter_widths > T::zero()) {
            return bad("filter radius must be positive".into());
        }
        if !(self.theta_min > T::zero() && self.theta_min < T::one()) {
            return bad(format!("theta_min = {} must lie in (0, 1)", self.theta_min));
        }
        if !(self.theta0 >= self.theta_min && self.theta0 <= T::one()) {
            return bad(format!("theta0 = {} must lie in [theta_min, 1]", self.theta0));
        }
        if self.variant == TopOptVariant::C && (self.kl_modes == 0 || self.kl_modes > self.nelx * self.nely) {
            return bad(format!("kl_modes = {} out of range", self.kl_modes));
        }
        Ok(())
    }
}

/// One resolution: mesh, filter, supports and unit basis loads.
#[derive(Debug, Clone)]
struct Level<T> {
    mesh: StructuredMesh<T>,
    kernel: FilterKernel<T>,
    fixed: Vec<usize>,
    bases: Vec<Vec<T>>,
}

impl<T: Real> Level<T> {
    fn new(mesh: StructuredMesh<T>, variant: TopOptVariant, filter_widths: T, beam_length: T) -> Self {
        let kernel = FilterKernel::with_widths(&mesh, filter_widths);
        let (nx, ny) = (mesh.nelx, mesh.nely);
        let mut fixed: Vec<usize> = (0..=ny).map(|iy| 2 * mesh.node(0, iy)).collect();
        fixed.push(2 * mesh.node(nx, 0) + 1);
        let n = mesh.n_dofs();
        let point = |dof: usize, v: T| {
            let mut f = vec![T::zero(); n];
            f[dof] = v;
            f
        };
        let corner = mesh.node(0, ny);
        let mut bases = vec![point(2 * corner + 1, -T::one())];
        if variant == TopOptVariant::B {
            let t = beam_length / T::lit(8.0) / mesh.element_size;
            let ix = (t - T::lit(0.5)).ceil().to_usize().unwrap_or(0).min(nx);
            let node = mesh.node(ix, ny);
            bases.push(point(2 * node, T::one()));
            bases.push(point(2 * node + 1, -T::one()));
        }
        Self {
            mesh,
            kernel,
            fixed,
            bases,
        }
    }
}

/// Basis solutions at one design: per-element Gram matrices `G_e[k][l] =
/// u_kᵀ k0 u_l` and load work `Φ[k][l] = f_kᵀ u_l`.
struct Superposition<T> {
    rho: Vec<T>,
    gram: Vec<Vec<T>>,
    work: Vec<T>,
    nb: usize,
}

impl<T: Real> Superposition<T> {
    fn compliance(&self, c: &[T]) -> T {
        quad(&self.work, c, self.nb)
    }

    fn energies(&self, c: &[T]) -> Vec<T> {
        self.gram.iter().map(|g| quad(g, c, self.nb)).collect()
    }
}

fn quad<T: Real>(m: &[T], c: &[T], nb: usize) -> T {
    let mut s = T::zero();
    for k in 0..nb {
        for l in 0..nb {
            s += c[k] * m[k * nb + l] * c[l];
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct TopOptProblem<T> {
    spec: TopOptSpec<T>,
    k0: ElementMatrix<T>,
    fine: Level<T>,
    coarse: Level<T>,
    kl: Option<KLField<T>>,
    mass_grad: Vec<T>,
    magnitude: LoadMagnitudeModel<T>,
    direction: LoadDirectionModel<T>,
}

impl<T: Real> TopOptProblem<T> {
    /// Builds both levels and, for variant C, the KL expansion.
    pub fn new(spec: TopOptSpec<T>) -> Result<Self> {
        let kl = match spec.variant {
            TopOptVariant::C => {
                let cov = CovarianceSpec::new(spec.kl_sigma, spec.correlation_length(), spec.correlation_length())?;
                Some(build_kl_grid(&cov, spec.nelx, spec.nely, T::one(), spec.kl_modes)?)
            }
            _ => None,
        };
        Self::with_kl(spec, kl)
    }

    /// Uses a precomputed (for example cached) KL expansion.
    pub fn with_kl(spec: TopOptSpec<T>, kl: Option<KLField<T>>) -> Result<Self> {
        spec.validate()?;
        let ne = spec.nelx * spec.nely;
        match (&kl, spec.variant) {
            (Some(k), TopOptVariant::C) => {
                check_len(ne, k.n_points())?;
                check_len(spec.kl_modes, k.n_modes())?;
            }
            (None, TopOptVariant::C) => return Err(Error::ConfigFault("variant c needs a KL expansion".into())),
            _ => {}
        }
        let fine_mesh = StructuredMesh::unit(spec.nelx, spec.nely)?;
        let coarse_mesh = fine_mesh.coarsened()?;
        let length = spec.beam_length();
        let fine = Level::new(fine_mesh, spec.variant, spec.filter_widths, length);
        let coarse = Level::new(coarse_mesh, spec.variant, spec.filter_widths, length);
        let mass_grad = mass_gradient(&fine.mesh, &fine.kernel, spec.lambda)?;
        Ok(Self {
            k0: element_stiffness(spec.nu)?,
            magnitude: LoadMagnitudeModel::new(spec.p0)?,
            direction: LoadDirectionModel::default(),
            kl: if spec.variant == TopOptVariant::C { kl } else { None },
            spec,
            fine,
            coarse,
            mass_grad,
        })
    }

    pub fn spec(&self) -> &TopOptSpec<T> {
        &self.spec
    }

    pub fn fine_mesh(&self) -> &StructuredMesh<T> {
        &self.fine.mesh
    }

    pub fn coarse_mesh(&self) -> &StructuredMesh<T> {
        &self.coarse.mesh
    }

    pub fn kl(&self) -> Option<&KLField<T>> {
        self.kl.as_ref()
    }

    /// Uniform `θ0` with box `[θ_min, 1]`.
    pub fn initial_design(&self) -> Result<DesignVector<T>> {
        DesignVector::with_uniform_bounds(
            vec![self.spec.theta0; self.fine.mesh.n_elements()],
            self.spec.theta_min,
            T::one(),
        )
    }

    /// Filtered fine-mesh densities.
    pub fn densities(&self, theta: &[T]) -> Result<Vec<T>> {
        self.fine.kernel.apply(theta)
    }

    /// `λ Σ v_i ρ_i` on the fine mesh.
    pub fn mass_term(&self, rho: &[T]) -> T {
        self.spec.lambda * rho.iter().copied().sum::<T>() * self.fine.mesh.element_volume()
    }

    /// Gradient of the filtered material fraction with respect to `θ`.
    pub fn mass_ratio_gradient(&self) -> Result<Vec<T>> {
        let mesh = &self.fine.mesh;
        let w = T::one() / (T::from_count(mesh.n_elements()) * mesh.element_volume());
        mass_gradient(mesh, &self.fine.kernel, w)
    }

    /// Load coefficients multiplying the unit basis loads.
    fn coefficients(&self, xi: &[T]) -> Result<Vec<T>> {
        let p = sample_load(&self.magnitude, xi[0])?;
        Ok(match self.spec.variant {
            TopOptVariant::B => {
                let phi = sample_direction(&self.direction, xi[1])?;
                vec![p, self.spec.p0 * phi.cos(), self.spec.p0 * phi.sin()]
            }
            _ => vec![p],
        })
    }

    /// Modulus field on the requested level, or `None` for `E0 ≡ 1`.
    fn modulus(&self, xi: &[T], fidelity: Fidelity) -> Result<Option<Vec<T>>> {
        let Some(kl) = &self.kl else { return Ok(None) };
        let z = kl.log_field(&xi[1..])?;
        let z = match fidelity {
            Fidelity::High => z,
            Fidelity::Low => restrict(&z, self.spec.nelx, self.spec.nely)?,
        };
        Ok(Some(z.into_iter().map(T::exp).collect()))
    }

    fn level(&self, fidelity: Fidelity) -> &Level<T> {
        match fidelity {
            Fidelity::High => &self.fine,
            Fidelity::Low => &self.coarse,
        }
    }

    fn level_design(&self, theta: &[T], fidelity: Fidelity) -> Result<Vec<T>> {
        check_len(self.n_theta(), theta.len())?;
        match fidelity {
            Fidelity::High => Ok(theta.to_vec()),
            Fidelity::Low => restrict(theta, self.spec.nelx, self.spec.nely),
        }
    }

    fn superpose(&self, lv: &Level<T>, theta_lv: &[T], e_field: Option<&[T]>) -> Result<Superposition<T>> {
        let rho = lv.kernel.apply(theta_lv)?;
        let sys = StiffnessSystem::assemble(&lv.mesh, &self.k0, &rho, e_field, self.spec.beta_p, &lv.fixed, self.spec.solver)?;
        let us = lv
            .bases
            .iter()
            .map(|f| sys.solve(f).map(|r| r.u))
            .collect::<Result<Vec<_>>>()?;
        let nb = us.len();
        let mut work = vec![T::zero(); nb * nb];
        for k in 0..nb {
            for l in 0..nb {
                work[k * nb + l] = dot(&lv.bases[k], &us[l]);
            }
        }
        let gram = (0..lv.mesh.n_elements())
            .map(|e| {
                let mut g = vec![T::zero(); nb * nb];
                for k in 0..nb {
                    for l in k..nb {
                        let v = bilinear(&self.k0, &lv.mesh, e, &us[k], &us[l]);
                        g[k * nb + l] = v;
                        g[l * nb + k] = v;
                    }
                }
                g
            })
            .collect();
        Ok(Superposition { rho, gram, work, nb })
    }

    /// Compliance gradient with respect to the level design.
    fn level_gradient(&self, lv: &Level<T>, sp: &Superposition<T>, c: &[T], e_field: Option<&[T]>) -> Result<Vec<T>> {
        let sens = element_sensitivities(&sp.rho, &sp.energies(c), self.spec.beta_p, e_field);
        lv.kernel.apply_transpose(&sens)
    }

    /// Maps a level compliance gradient to the fine design and adds the mass
    /// term.
    fn finish_gradient(&self, g: Vec<T>, fidelity: Fidelity) -> Result<Vec<T>> {
        let g = match fidelity {
            Fidelity::High => g,
            Fidelity::Low => {
                let (p, _) = prolong(&g, self.coarse.mesh.nelx, self.coarse.mesh.nely)?;
                let quarter = T::lit(0.25);
                p.into_iter().map(|v| v * quarter).collect()
            }
        };
        Ok(g.into_iter().zip(&self.mass_grad).map(|(a, &b)| a + b).collect())
    }

    fn attach(&self, e: Error, xi: &RandomRealization<T>) -> Error {
        let v: Vec<f64> = xi.xi.iter().map(|x| x.as_f64()).collect();
        e.with_xi(&v)
    }

    fn check_xi(&self, xi: &RandomRealization<T>) -> Result<()> {
        check_len(self.n_xi(), xi.xi.len())
    }

    /// Gradient and objective for one realization with its own solve.
    fn evaluate_one(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<(Vec<T>, T)> {
        self.check_xi(xi)?;
        let lv = self.level(fidelity);
        let th = self.level_design(theta, fidelity)?;
        let c = self.coefficients(&xi.xi)?;
        let e = self.modulus(&xi.xi, fidelity)?;
        let sp = self.superpose(lv, &th, e.as_deref()).map_err(|err| self.attach(err, xi))?;
        let g = self.level_gradient(lv, &sp, &c, e.as_deref())?;
        Ok((self.finish_gradient(g, fidelity)?, sp.compliance(&c)))
    }

    /// Realization-wise compliance `f(ξ)ᵀu(ξ)` at the requested fidelity.
    pub fn compliance(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
        self.evaluate_one(theta, xi, fidelity).map(|r| r.1)
    }
}

impl<T: Real> BiFidelityOracle<T> for TopOptProblem<T> {
    fn n_theta(&self) -> usize {
        self.fine.mesh.n_elements()
    }

    fn n_xi(&self) -> usize {
        match self.spec.variant {
            TopOptVariant::A => 1,
            TopOptVariant::B => 2,
            TopOptVariant::C => 1 + self.spec.kl_modes,
        }
    }

    fn gamma(&self) -> T {
        self.spec.gamma
    }

    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<T> {
        let mut xi = vec![T::lit(rng.random_range(0.0..=1.0))];
        match self.spec.variant {
            TopOptVariant::A => {}
            TopOptVariant::B => {
                let w = self.direction.half_width.as_f64();
                xi.push(T::lit(rng.random_range(-w..=w)));
            }
            TopOptVariant::C => {
                xi.extend((0..self.spec.kl_modes).map(|_| T::lit(StandardNormal.sample(&mut *rng))));
            }
        }
        RandomRealization::new(xi)
    }

    fn grad(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<Vec<T>> {
        self.evaluate_one(theta, xi, fidelity).map(|r| r.0)
    }

    fn objective(&self, theta: &[T], xi: &RandomRealization<T>, fidelity: Fidelity) -> Result<T> {
        let c = self.compliance(theta, xi, fidelity)?;
        Ok(c + self.mass_term(&self.densities(theta)?))
    }

    /// Loads enter linearly, so variants a and b factor once and superpose;
    /// variant c solves each realization in parallel.
    fn grad_batch(&self, theta: &[T], xis: &[RandomRealization<T>], fidelity: Fidelity) -> Result<Vec<Vec<T>>> {
        if xis.is_empty() {
            return Ok(Vec::new());
        }
        for xi in xis {
            self.check_xi(xi)?;
        }
        if self.kl.is_some() {
            return xis.par_iter().map(|xi| self.grad(theta, xi, fidelity)).collect();
        }
        let lv = self.level(fidelity);
        let th = self.level_design(theta, fidelity)?;
        let sp = self.superpose(lv, &th, None).map_err(|e| self.attach(e, &xis[0]))?;
        xis.iter()
            .map(|xi| {
                let c = self.coefficients(&xi.xi)?;
                self.finish_gradient(self.level_gradient(lv, &sp, &c, None)?, fidelity)
            })
            .collect()
    }

    fn mean_objective(&self, theta: &[T], xis: &[RandomRealization<T>]) -> Result<T> {
        if xis.is_empty() {
            return Err(Error::InsufficientData { needed: 1, found: 0 });
        }
        let mass = self.mass_term(&self.densities(theta)?);
        let total: T = if self.kl.is_some() {
            xis.par_iter()
                .map(|xi| self.compliance(theta, xi, Fidelity::High))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .sum()
        } else {
            for xi in xis {
                self.check_xi(xi)?;
            }
            let sp = self
                .superpose(&self.fine, theta, None)
                .map_err(|e| self.attach(e, &xis[0]))?;
            xis.iter()
                .map(|xi| self.coefficients(&xi.xi).map(|c| sp.compliance(&c)))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .sum()
        };
        Ok(total / T::from_count(xis.len()) + mass)
    }

    fn mass_ratio(&self, theta: &[T]) -> Option<T> {
        self.densities(theta).ok().map(|rho| mass_ratio(&self.fine.mesh, &rho))
    }
}
