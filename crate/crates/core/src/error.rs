use thiserror::Error;

use crate::vector::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0} is not strictly inside the domain")]
    NotInside(Vec3),

    #[error("direction {0} is not unit length")]
    NotUnit(Vec3),

    #[error("kernel power must be 1 or 2, got {0}")]
    KernelPower(u32),

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("operation `{op}` does not apply to {variant} sources")]
    WrongVariant { op: &'static str, variant: &'static str },

    #[error("point {point} is within {margin} of the domain boundary")]
    NearBoundary { point: Vec3, margin: f64 },

    #[error("continuity violated: residual {residual:e} at {point} exceeds {tolerance:e}")]
    ContinuityViolated { residual: f64, point: Vec3, tolerance: f64 },

    #[error("tangency violated: |j.n| = {value:e} on the boundary exceeds {tolerance:e}")]
    TangencyViolated { value: f64, tolerance: f64 },

    #[error("convergence study needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
