//! Plane-stress finite elements on structured square grids with SIMP
//! interpolation, density filtering and two-grid transfer.

mod element;
mod export;
mod filter;
mod mesh;
mod sensitivity;
mod solve;
mod transfer;

pub use element::{element_stiffness, simp_modulus, ElementMatrix};
pub use export::{field_to_csv, format_sig};
pub use filter::{density_filter, FilterKernel};
pub use mesh::StructuredMesh;
pub use sensitivity::{
    bilinear, compliance_gradient, element_energies, element_sensitivities, mass_gradient, mass_ratio, DensityField,
};
pub use solve::{assemble_and_solve, residual_tolerance, LinearSolver, LoadCase, SolveResult, StiffnessSystem};
pub use transfer::{prolong, restrict, Interpolation};
