//! Dense and banded linear algebra kernels, generic over [`Real`](crate::Real).

mod banded;
mod dense;
mod eigen;

pub use banded::BandedSpd;
pub use dense::{solve_dense, DenseMatrix};
pub use eigen::{symmetric_eigen, SymmetricEigen};
