//! Volume, surface and frequency-band integration.
//!
//! Volume integrals of `f / d^p` (with `d` the distance to an observation
//! point `p0`) are evaluated in one of three ways:
//!
//! * `p0` well outside the domain: the domain's regular product rule.
//! * `p0` inside: polar coordinates centred on `p0`. The volume element
//!   `u^2 sin(alpha) du dalpha dbeta` absorbs the `1/u^p` kernel for
//!   `p <= 2`, and each ray runs from `p0` to the boundary exit distance.
//! * `p0` outside but within the exclusion margin: the same polar
//!   construction with rays clipped to their entry/exit interval.

pub mod rules;

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Region, SurfaceMesh};
use crate::vector::Vec3;

pub use rules::Rule1d;

/// Values that can be accumulated by a quadrature rule.
pub trait Accumulate: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Accumulate for T where T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> {}

/// Discretization parameters for every numerical evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Radial nodes per ray (and per radius in the ball product rule).
    pub n_radial: usize,
    /// Polar-angle nodes.
    pub n_polar: usize,
    /// Azimuthal nodes.
    pub n_azimuth: usize,
    /// Per-axis nodes for tensor rules on boxes.
    pub n_regular: usize,
    /// Finite-difference step in length units.
    pub fd_step: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_radial: 48,
            n_polar: 32,
            n_azimuth: 64,
            n_regular: 24,
            fd_step: 1e-3,
        }
    }
}

impl QuadratureSpec {
    /// Checks the count minimums and that `fd_step` is positive.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("n_radial", self.n_radial, 4),
            ("n_polar", self.n_polar, 4),
            ("n_azimuth", self.n_azimuth, 8),
            ("n_regular", self.n_regular, 8),
        ];
        for (name, value, min) in checks {
            if value < min {
                return Err(Error::InvalidSpec(format!("{name} = {value} must be >= {min}")));
            }
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "fd_step = {} must be positive",
                self.fd_step
            )));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus `fd_step < 0.1 * diameter`.
    pub fn validate_for<R: Region + ?Sized>(&self, domain: &R) -> Result<()> {
        self.validate()?;
        let limit = 0.1 * domain.diameter();
        if self.fd_step >= limit {
            return Err(Error::InvalidSpec(format!(
                "fd_step = {} must be below 0.1 x domain diameter = {limit}",
                self.fd_step
            )));
        }
        Ok(())
    }

    /// One simultaneous refinement level: node counts doubled, `fd_step` halved.
    pub fn refined(&self) -> Self {
        Self {
            n_radial: 2 * self.n_radial,
            n_polar: 2 * self.n_polar,
            n_azimuth: 2 * self.n_azimuth,
            n_regular: 2 * self.n_regular,
            fd_step: 0.5 * self.fd_step,
        }
    }

    /// Distance outside the domain below which the desingularized path is used.
    pub fn exclusion_margin(&self) -> f64 {
        2.0 * self.fd_step
    }
}

/// Relative position of a source point seen from the observation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint {
    /// Distance `|r0 - r|`.
    pub d: f64,
    /// `(r0 - r) / d`; unit length whenever `d > 0`.
    pub direction: Vec3,
}

impl KernelPoint {
    pub fn between(observer: Vec3, source: Vec3) -> Self {
        let v = observer - source;
        let d = v.norm();
        let direction = if d > 0.0 { v * (1.0 / d) } else { Vec3::ZERO };
        Self { d, direction }
    }
}

/// Product-rule approximation of the volume integral of `f` over `domain`.
pub fn integrate_regular<R, T, F>(domain: &R, f: F, spec: &QuadratureSpec) -> T
where
    R: Region + ?Sized,
    T: Accumulate,
    F: Fn(Vec3) -> T,
{
    integrate_regular_toward(domain, f, spec, None)
}

/// Like [`integrate_regular`], letting the rule orient itself toward a
/// point of interest (the ball rule puts its polar axis there).
pub fn integrate_regular_toward<R, T, F>(domain: &R, f: F, spec: &QuadratureSpec, focus: Option<Vec3>) -> T
where
    R: Region + ?Sized,
    T: Accumulate,
    F: Fn(Vec3) -> T,
{
    domain
        .volume_rule(spec, focus)
        .iter()
        .fold(T::default(), |acc, node| acc + f(node.point) * node.weight)
}

/// Evaluates `∫_D f / d^kernel_power dV` for `p0` strictly inside `domain`
/// using polar coordinates centred on `p0`.
///
/// `f` receives the source point and its [`KernelPoint`]; it must be the
/// bounded numerator only.
pub fn integrate_polar_singular<R, T, F>(
    domain: &R,
    p0: Vec3,
    f: F,
    kernel_power: u32,
    spec: &QuadratureSpec,
) -> Result<T>
where
    R: Region + ?Sized,
    T: Accumulate,
    F: Fn(Vec3, KernelPoint) -> T,
{
    if !domain.contains(p0) {
        return Err(Error::NotInside(p0));
    }
    integrate_polar_rays(domain, p0, f, kernel_power, spec)
}

/// Polar integration about any `p0`: rays are clipped to the part of the
/// domain they cross, so `p0` may also lie outside.
pub(crate) fn integrate_polar_rays<R, T, F>(
    domain: &R,
    p0: Vec3,
    f: F,
    kernel_power: u32,
    spec: &QuadratureSpec,
) -> Result<T>
where
    R: Region + ?Sized,
    T: Accumulate,
    F: Fn(Vec3, KernelPoint) -> T,
{
    if !(1..=2).contains(&kernel_power) {
        return Err(Error::KernelPower(kernel_power));
    }
    let radial = Rule1d::gauss_legendre_on(spec.n_radial, 0.0, 1.0);
    let mut total = T::default();
    for ray in domain.direction_rule(p0, spec) {
        let len = ray.t_out - ray.t_in;
        if len <= 0.0 {
            continue;
        }
        let toward_observer = -ray.dir;
        let mut along = T::default();
        for (x, w) in radial.iter() {
            let u = ray.t_in + len * x;
            // u^2 Jacobian over d^p, with d = u
            let jac = if kernel_power == 1 { u } else { 1.0 };
            let kp = KernelPoint {
                d: u,
                direction: toward_observer,
            };
            along = along + f(p0 + ray.dir * u, kp) * (w * jac);
        }
        total = total + along * (len * ray.weight);
    }
    Ok(total)
}

/// `∫_D f / d^kernel_power dV` for an arbitrary observation point, choosing
/// the regular rule when `p0` is farther than the exclusion margin outside
/// the domain and the polar construction otherwise.
pub fn integrate_kernel<R, T, F>(domain: &R, p0: Vec3, f: F, kernel_power: u32, spec: &QuadratureSpec) -> Result<T>
where
    R: Region + ?Sized,
    T: Accumulate,
    F: Fn(Vec3, KernelPoint) -> T,
{
    if !(1..=2).contains(&kernel_power) {
        return Err(Error::KernelPower(kernel_power));
    }
    if domain.signed_distance(p0) > spec.exclusion_margin() {
        let power = kernel_power as i32;
        Ok(integrate_regular_toward(
            domain,
            |r| {
                let kp = KernelPoint::between(p0, r);
                f(r, kp) * kp.d.powi(-power)
            },
            spec,
            Some(p0),
        ))
    } else {
        integrate_polar_rays(domain, p0, f, kernel_power, spec)
    }
}

/// `Σ weight · f(point, normal)` over a surface mesh.
pub fn integrate_surface<T, F>(mesh: &SurfaceMesh, f: F) -> T
where
    T: Accumulate,
    F: Fn(Vec3, Vec3) -> T,
{
    mesh.samples
        .iter()
        .fold(T::default(), |acc, s| acc + f(s.point, s.normal) * s.weight)
}

/// Discrete band integral `Σ weight(ω) · g(ω)`.
pub fn integrate_band<T, G>(components: &[(f64, Complex64)], g: G) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<Complex64, Output = T>,
    G: Fn(f64) -> T,
{
    components
        .iter()
        .fold(T::default(), |acc, &(omega, w)| acc + g(omega) * w)
}
