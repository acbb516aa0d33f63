//! Retarded electromagnetic potentials and fields of finite-support
//! sources, with numerical checks of the Maxwell equations, the Lorenz
//! gauge, the potential wave equations and the Gauss flux law.
//!
//! Units are Gaussian: `div E = 4 pi rho`, `rot H - (1/c) dE/dt = (4 pi / c) j`.
//! Time-harmonic quantities carry the factor `exp(-i omega t)`.

// `!(x <= tol)` is used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod geometry;
pub mod potentials;
pub mod quadrature;
mod retarded;
pub mod sources;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use fields::FieldSample;
pub use geometry::{Region, SpatialDomain, SurfaceMesh};
pub use potentials::PotentialSample;
pub use quadrature::QuadratureSpec;
pub use sources::{Constants, SourceModel};
pub use vector::{CVec3, Vec3};
pub use verify::{ConvergenceRecord, ResidualReport};

pub use num_complex::Complex64;
