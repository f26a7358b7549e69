//! Random-input models: load magnitude, load direction and a lognormal
//! modulus field from a truncated Karhunen–Loève expansion.

mod kl;
mod load;

pub use kl::{build_kl, build_kl_grid, read_kl, sample_field, write_kl, CovarianceSpec, KLField, KlCache};
pub use load::{sample_direction, sample_load, LoadDirectionModel, LoadMagnitudeModel};
