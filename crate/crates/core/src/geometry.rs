//! Finite source regions, their boundaries, and ray-exit distances.
//!
//! Quadrature code only talks to the [`Region`] trait. A new region shape
//! implements membership, ray clipping and its node tables; the integrators
//! pick them up unchanged.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{QuadratureSpec, Rule1d};
use crate::vector::Vec3;

/// Tolerance on `|dir| - 1` accepted by [`Region::ray_exit_distance`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A weighted point of a volume rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeNode {
    pub point: Vec3,
    pub weight: f64,
}

/// One direction of a polar rule centred on an observation point.
///
/// The ray `p0 + t * dir` lies in the domain for `t_in < t < t_out`;
/// `weight` is the solid-angle weight of the direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayNode {
    pub dir: Vec3,
    pub weight: f64,
    pub t_in: f64,
    pub t_out: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceSample {
    pub point: Vec3,
    /// Outward unit normal.
    pub normal: Vec3,
    /// Area weight.
    pub weight: f64,
}

/// Weighted samples of a closed surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfaceMesh {
    pub samples: Vec<SurfaceSample>,
}

impl SurfaceMesh {
    pub fn area(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A bounded, convex source region.
pub trait Region: Send + Sync {
    /// Strict interior membership; boundary points are outside.
    fn contains(&self, p: Vec3) -> bool;

    /// Negative inside, positive outside, zero on the boundary.
    fn signed_distance(&self, p: Vec3) -> f64;

    /// Parameter interval `[t_in, t_out]` (with `t_in >= 0`) over which the
    /// ray `origin + t * dir` is inside the region, if any.
    fn ray_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)>;

    /// Centre and radius of a sphere containing the region.
    fn bounding_sphere(&self) -> (Vec3, f64);

    fn diameter(&self) -> f64;

    fn volume(&self) -> f64;

    fn surface_area(&self) -> f64;

    /// Non-singular product rule over the region. `focus` is a hint of
    /// where the integrand varies fastest.
    fn volume_rule(&self, spec: &QuadratureSpec, focus: Option<Vec3>) -> Vec<VolumeNode>;

    /// Surface samples of the boundary, refined by `resolution` (at least 4).
    fn boundary_mesh(&self, resolution: usize) -> SurfaceMesh;

    /// Directions (with solid-angle weights and ray intervals) for polar
    /// integration about `p0`. The default covers the whole sphere with
    /// Gauss–Legendre polar angles and uniform azimuths.
    fn direction_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        sphere_direction_rule(self, p0, Vec3::Z, spec.n_polar, spec.n_azimuth)
    }

    /// Distance from an interior `p0` to the boundary along unit `dir`.
    fn ray_exit_distance(&self, p0: Vec3, dir: Vec3) -> Result<f64> {
        if !self.contains(p0) {
            return Err(Error::NotInside(p0));
        }
        if (dir.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit(dir));
        }
        self.ray_interval(p0, dir)
            .map(|(_, t_out)| t_out)
            .ok_or(Error::NotInside(p0))
    }
}

/// Full-sphere direction rule about `axis`, keeping only rays that cross
/// the region.
pub fn sphere_direction_rule<R: Region + ?Sized>(
    region: &R,
    p0: Vec3,
    axis: Vec3,
    n_polar: usize,
    n_azimuth: usize,
) -> Vec<RayNode> {
    let polar = Rule1d::gauss_legendre_on(n_polar, 0.0, PI);
    let azimuth = Rule1d::periodic(n_azimuth, 0.0, 2.0 * PI);
    let (e1, e2) = axis.orthonormal_frame();
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for (alpha, wa) in polar.iter() {
        let (sa, ca) = alpha.sin_cos();
        for (beta, wb) in azimuth.iter() {
            let (sb, cb) = beta.sin_cos();
            let dir = axis * ca + (e1 * cb + e2 * sb) * sa;
            if let Some((t_in, t_out)) = region.ray_interval(p0, dir) {
                out.push(RayNode {
                    dir,
                    weight: sa * wa * wb,
                    t_in,
                    t_out,
                });
            }
        }
    }
    out
}

/// A solid ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidDomain("ball center must be finite".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    /// Directions from an exterior `p0` restricted to the cone that sees
    /// the ball. With `alpha = alpha_max (1 - (1 - s)^2)` the chord length,
    /// which has a square-root edge at `alpha_max`, becomes smooth in `s`.
    fn exterior_cone_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        let to_center = self.center - p0;
        let dist = to_center.norm();
        let axis = to_center * (1.0 / dist);
        let alpha_max = (self.radius / dist).min(1.0).asin();
        let s_rule = Rule1d::gauss_legendre_on(spec.n_polar, 0.0, 1.0);
        let azimuth = Rule1d::periodic(spec.n_azimuth, 0.0, 2.0 * PI);
        let (e1, e2) = axis.orthonormal_frame();
        let mut out = Vec::with_capacity(spec.n_polar * spec.n_azimuth);
        for (s, ws) in s_rule.iter() {
            let alpha = alpha_max * (1.0 - (1.0 - s) * (1.0 - s));
            let dalpha = 2.0 * alpha_max * (1.0 - s);
            let (sa, ca) = alpha.sin_cos();
            for (beta, wb) in azimuth.iter() {
                let (sb, cb) = beta.sin_cos();
                let dir = axis * ca + (e1 * cb + e2 * sb) * sa;
                if let Some((t_in, t_out)) = self.ray_interval(p0, dir) {
                    out.push(RayNode {
                        dir,
                        weight: sa * dalpha * ws * wb,
                        t_in,
                        t_out,
                    });
                }
            }
        }
        out
    }
}

impl Region for Ball {
    fn contains(&self, p: Vec3) -> bool {
        (p - self.center).norm_squared() < self.radius * self.radius
    }

    fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.center).norm() - self.radius
    }

    fn ray_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let oc = origin - self.center;
        let b = dir.dot(oc);
        let c = oc.norm_squared() - self.radius * self.radius;
        let disc = b * b - c;
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // roots of t^2 + 2bt + c, computed without cancellation
        let q = if b > 0.0 { -b - sq } else { -b + sq };
        let (mut t1, mut t2) = if q != 0.0 { (q, c / q) } else { (-sq, sq) };
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        if t2 <= 0.0 {
            return None;
        }
        Some((t1.max(0.0), t2))
    }

    fn bounding_sphere(&self) -> (Vec3, f64) {
        (self.center, self.radius)
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    fn surface_area(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }

    /// Radial Gauss–Legendre × polar Gauss–Legendre × uniform azimuth about
    /// the centre, with the polar axis pointing at `focus` when given.
    fn volume_rule(&self, spec: &QuadratureSpec, focus: Option<Vec3>) -> Vec<VolumeNode> {
        let axis = focus
            .map(|f| f - self.center)
            .filter(|v| v.norm() > 1e-12 * self.radius)
            .map(Vec3::normalized)
            .unwrap_or(Vec3::Z);
        let (e1, e2) = axis.orthonormal_frame();
        let radial = Rule1d::gauss_legendre_on(spec.n_radial, 0.0, self.radius);
        let polar = Rule1d::gauss_legendre_on(spec.n_polar, 0.0, PI);
        let azimuth = Rule1d::periodic(spec.n_azimuth, 0.0, 2.0 * PI);
        let mut nodes = Vec::with_capacity(radial.len() * polar.len() * azimuth.len());
        for (theta, wt) in polar.iter() {
            let (st, ct) = theta.sin_cos();
            for (phi, wp) in azimuth.iter() {
                let (sp, cp) = phi.sin_cos();
                let dir = axis * ct + (e1 * cp + e2 * sp) * st;
                for (r, wr) in radial.iter() {
                    nodes.push(VolumeNode {
                        point: self.center + dir * r,
                        weight: r * r * st * wr * wt * wp,
                    });
                }
            }
        }
        nodes
    }

    /// Gauss–Legendre in the polar angle, uniform in azimuth (`2 * resolution`).
    fn boundary_mesh(&self, resolution: usize) -> SurfaceMesh {
        assert!(resolution >= 4, "boundary mesh resolution must be >= 4");
        let polar = Rule1d::gauss_legendre_on(resolution, 0.0, PI);
        let azimuth = Rule1d::periodic(2 * resolution, 0.0, 2.0 * PI);
        let r2 = self.radius * self.radius;
        let mut samples = Vec::with_capacity(polar.len() * azimuth.len());
        for (theta, wt) in polar.iter() {
            let (st, ct) = theta.sin_cos();
            for (phi, wp) in azimuth.iter() {
                let (sp, cp) = phi.sin_cos();
                let normal = Vec3::new(st * cp, st * sp, ct);
                samples.push(SurfaceSample {
                    point: self.center + normal * self.radius,
                    normal,
                    weight: r2 * st * wt * wp,
                });
            }
        }
        SurfaceMesh { samples }
    }

    fn direction_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        if self.contains(p0) {
            sphere_direction_rule(self, p0, Vec3::Z, spec.n_polar, spec.n_azimuth)
        } else {
            self.exterior_cone_rule(p0, spec)
        }
    }
}

/// An axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub min: Vec3,
    pub max: Vec3,
}

impl Cuboid {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidDomain("box corners must be finite".into()));
        }
        for i in 0..3 {
            if min[i] >= max[i] {
                return Err(Error::InvalidDomain(format!(
                    "box is degenerate along axis {i}: min {} >= max {}",
                    min[i], max[i]
                )));
            }
        }
        Ok(Self { min, max })
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Pyramid decomposition about an interior `p0`: one pyramid per face,
    /// each face split at the foot of the perpendicular from `p0`. On a
    /// face at perpendicular distance `h`, the solid angle element is
    /// `h dA / L^3` and the exit distance is `L = |q - p0|`.
    fn interior_face_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        let n = (spec.n_polar / 2).max(4);
        let base = Rule1d::gauss_legendre(n);
        let mut out = Vec::with_capacity(6 * 4 * n * n);
        for axis in 0..3 {
            let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
            for plane in [self.min[axis], self.max[axis]] {
                let h = (plane - p0[axis]).abs();
                let b_parts = [(self.min[b], p0[b]), (p0[b], self.max[b])];
                let c_parts = [(self.min[c], p0[c]), (p0[c], self.max[c])];
                for &(b0, b1) in &b_parts {
                    let rb = base.mapped(b0, b1);
                    for &(c0, c1) in &c_parts {
                        let rc = base.mapped(c0, c1);
                        for (qb, wb) in rb.iter() {
                            for (qc, wc) in rc.iter() {
                                let mut q = [0.0; 3];
                                q[axis] = plane;
                                q[b] = qb;
                                q[c] = qc;
                                let v = Vec3::from(q) - p0;
                                let len = v.norm();
                                out.push(RayNode {
                                    dir: v * (1.0 / len),
                                    weight: h * wb * wc / (len * len * len),
                                    t_in: 0.0,
                                    t_out: len,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl Region for Cuboid {
    fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| p[i] > self.min[i] && p[i] < self.max[i])
    }

    fn signed_distance(&self, p: Vec3) -> f64 {
        let half = self.extent() * 0.5;
        let rel = p - self.center();
        let q = Vec3::new(rel.x.abs(), rel.y.abs(), rel.z.abs()) - half;
        let outside = q.max(Vec3::ZERO).norm();
        let inside = q.x.max(q.y).max(q.z).min(0.0);
        outside + inside
    }

    fn ray_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        for i in 0..3 {
            if dir[i] == 0.0 {
                if origin[i] <= self.min[i] || origin[i] >= self.max[i] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dir[i];
            let (mut t0, mut t1) = ((self.min[i] - origin[i]) * inv, (self.max[i] - origin[i]) * inv);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
        }
        let t_in = t_enter.max(0.0);
        (t_exit > t_in).then_some((t_in, t_exit))
    }

    fn bounding_sphere(&self) -> (Vec3, f64) {
        (self.center(), 0.5 * self.extent().norm())
    }

    fn diameter(&self) -> f64 {
        self.extent().norm()
    }

    fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    fn surface_area(&self) -> f64 {
        let e = self.extent();
        2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
    }

    /// Tensor Gauss–Legendre with `n_regular` nodes per axis.
    fn volume_rule(&self, spec: &QuadratureSpec, _focus: Option<Vec3>) -> Vec<VolumeNode> {
        let rules: Vec<Rule1d> = (0..3)
            .map(|i| Rule1d::gauss_legendre_on(spec.n_regular, self.min[i], self.max[i]))
            .collect();
        let mut nodes = Vec::with_capacity(spec.n_regular.pow(3));
        for (z, wz) in rules[2].iter() {
            for (y, wy) in rules[1].iter() {
                for (x, wx) in rules[0].iter() {
                    nodes.push(VolumeNode {
                        point: Vec3::new(x, y, z),
                        weight: wx * wy * wz,
                    });
                }
            }
        }
        nodes
    }

    /// Tensor Gauss–Legendre on each face, `resolution` nodes per edge.
    fn boundary_mesh(&self, resolution: usize) -> SurfaceMesh {
        assert!(resolution >= 4, "boundary mesh resolution must be >= 4");
        let mut samples = Vec::with_capacity(6 * resolution * resolution);
        for axis in 0..3 {
            let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
            let rb = Rule1d::gauss_legendre_on(resolution, self.min[b], self.max[b]);
            let rc = Rule1d::gauss_legendre_on(resolution, self.min[c], self.max[c]);
            for (plane, sign) in [(self.min[axis], -1.0), (self.max[axis], 1.0)] {
                let normal = Vec3::axis(axis) * sign;
                for (qb, wb) in rb.iter() {
                    for (qc, wc) in rc.iter() {
                        let mut q = [0.0; 3];
                        q[axis] = plane;
                        q[b] = qb;
                        q[c] = qc;
                        samples.push(SurfaceSample {
                            point: Vec3::from(q),
                            normal,
                            weight: wb * wc,
                        });
                    }
                }
            }
        }
        SurfaceMesh { samples }
    }

    fn direction_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        if self.contains(p0) {
            self.interior_face_rule(p0, spec)
        } else {
            let axis = (self.center() - p0).normalized();
            sphere_direction_rule(self, p0, axis, spec.n_polar, spec.n_azimuth)
        }
    }
}

/// The support region of a source model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SpatialDomain {
    Ball(Ball),
    Box(Cuboid),
}

impl SpatialDomain {
    pub fn ball(center: Vec3, radius: f64) -> Result<Self> {
        Ball::new(center, radius).map(Self::Ball)
    }

    pub fn cuboid(min: Vec3, max: Vec3) -> Result<Self> {
        Cuboid::new(min, max).map(Self::Box)
    }

    /// Re-checks the construction invariants (for deserialized values).
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Ball(b) => Ball::new(b.center, b.radius).map(|_| ()),
            Self::Box(b) => Cuboid::new(b.min, b.max).map(|_| ()),
        }
    }

    pub fn center(&self) -> Vec3 {
        self.bounding_sphere().0
    }

    fn region(&self) -> &dyn Region {
        match self {
            Self::Ball(b) => b,
            Self::Box(b) => b,
        }
    }
}

impl Region for SpatialDomain {
    fn contains(&self, p: Vec3) -> bool {
        self.region().contains(p)
    }
    fn signed_distance(&self, p: Vec3) -> f64 {
        self.region().signed_distance(p)
    }
    fn ray_interval(&self, origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        self.region().ray_interval(origin, dir)
    }
    fn bounding_sphere(&self) -> (Vec3, f64) {
        self.region().bounding_sphere()
    }
    fn diameter(&self) -> f64 {
        self.region().diameter()
    }
    fn volume(&self) -> f64 {
        self.region().volume()
    }
    fn surface_area(&self) -> f64 {
        self.region().surface_area()
    }
    fn volume_rule(&self, spec: &QuadratureSpec, focus: Option<Vec3>) -> Vec<VolumeNode> {
        self.region().volume_rule(spec, focus)
    }
    fn boundary_mesh(&self, resolution: usize) -> SurfaceMesh {
        self.region().boundary_mesh(resolution)
    }
    fn direction_rule(&self, p0: Vec3, spec: &QuadratureSpec) -> Vec<RayNode> {
        self.region().direction_rule(p0, spec)
    }
}

/// Free-function form of [`Region::contains`].
pub fn contains<R: Region + ?Sized>(domain: &R, p: Vec3) -> bool {
    domain.contains(p)
}

/// Free-function form of [`Region::ray_exit_distance`].
pub fn ray_exit_distance<R: Region + ?Sized>(domain: &R, p0: Vec3, dir: Vec3) -> Result<f64> {
    domain.ray_exit_distance(p0, dir)
}

/// Free-function form of [`Region::boundary_mesh`].
pub fn boundary_mesh<R: Region + ?Sized>(domain: &R, resolution: usize) -> SurfaceMesh {
    domain.boundary_mesh(resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_ball() -> SpatialDomain {
        SpatialDomain::ball(Vec3::ZERO, 1.0).unwrap()
    }

    fn unit_cube() -> SpatialDomain {
        SpatialDomain::cuboid(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(contains(&unit_ball(), Vec3::ZERO));
        assert!(!contains(&unit_ball(), Vec3::new(2.0, 0.0, 0.0)));
        assert!(contains(&unit_cube(), Vec3::new(0.5, 0.5, 0.5)));
        // boundary is not interior
        assert!(!contains(&unit_ball(), Vec3::X));
        assert!(!contains(&unit_cube(), Vec3::new(1.0, 0.5, 0.5)));
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(SpatialDomain::ball(Vec3::ZERO, -1.0).is_err());
        assert!(SpatialDomain::ball(Vec3::ZERO, 0.0).is_err());
        assert!(SpatialDomain::cuboid(Vec3::ZERO, Vec3::new(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn exit_distance_examples() {
        let b = unit_ball();
        for dir in [Vec3::X, -Vec3::Y, Vec3::new(1.0, 2.0, -2.0).normalized()] {
            assert!((ray_exit_distance(&b, Vec3::ZERO, dir).unwrap() - 1.0).abs() < 1e-15);
        }
        let p = Vec3::new(0.5, 0.0, 0.0);
        assert!((ray_exit_distance(&b, p, Vec3::X).unwrap() - 0.5).abs() < 1e-15);
        assert!((ray_exit_distance(&b, p, -Vec3::X).unwrap() - 1.5).abs() < 1e-15);
        let c = unit_cube();
        let q = Vec3::new(0.25, 0.5, 0.5);
        assert!((ray_exit_distance(&c, q, -Vec3::X).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exit_distance_errors() {
        let b = unit_ball();
        assert_eq!(
            ray_exit_distance(&b, Vec3::new(2.0, 0.0, 0.0), Vec3::X),
            Err(Error::NotInside(Vec3::new(2.0, 0.0, 0.0)))
        );
        assert!(matches!(
            ray_exit_distance(&b, Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0)),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn mesh_areas() {
        for (r, res) in [(1.0, 8), (2.0, 16)] {
            let m = boundary_mesh(&SpatialDomain::ball(Vec3::ZERO, r).unwrap(), res);
            let exact = 4.0 * PI * r * r;
            assert!(((m.area() - exact) / exact).abs() < 1e-6, "{}", m.area());
        }
        assert!((boundary_mesh(&unit_cube(), 4).area() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_mesh_area_converges_under_refinement() {
        let b = unit_ball();
        let errs: Vec<f64> = [4, 6, 8]
            .iter()
            .map(|&n| (boundary_mesh(&b, n).area() - 4.0 * PI).abs())
            .collect();
        assert!(errs[1] < errs[0] && errs[2] <= errs[1].max(1e-13), "{errs:?}");
    }

    #[test]
    fn mesh_normals_unit_and_closed() {
        for d in [unit_ball(), unit_cube()] {
            let m = boundary_mesh(&d, 12);
            for s in &m.samples {
                assert!((s.normal.norm() - 1.0).abs() < 1e-12);
            }
            let flux: f64 = m.samples.iter().map(|s| s.normal.x * s.weight).sum();
            assert!(flux.abs() < 1e-6);
        }
    }

    #[test]
    fn cuboid_signed_distance() {
        let c = unit_cube();
        assert!((c.signed_distance(Vec3::new(0.5, 0.5, 0.5)) + 0.5).abs() < 1e-15);
        assert!((c.signed_distance(Vec3::new(2.0, 0.5, 0.5)) - 1.0).abs() < 1e-15);
        assert!((c.signed_distance(Vec3::new(2.0, 2.0, 0.5)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ray_interval_from_outside() {
        let b = unit_ball();
        let (t0, t1) = b.ray_interval(Vec3::new(-3.0, 0.0, 0.0), Vec3::X).unwrap();
        assert!((t0 - 2.0).abs() < 1e-15 && (t1 - 4.0).abs() < 1e-15);
        assert!(b.ray_interval(Vec3::new(-3.0, 0.0, 0.0), -Vec3::X).is_none());
        let c = unit_cube();
        let (t0, t1) = c.ray_interval(Vec3::new(-1.0, 0.5, 0.5), Vec3::X).unwrap();
        assert!((t0 - 1.0).abs() < 1e-15 && (t1 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn direction_rules_cover_full_solid_angle_from_inside() {
        let spec = QuadratureSpec::default();
        for (d, p) in [
            (unit_ball(), Vec3::new(0.3, -0.2, 0.5)),
            (unit_cube(), Vec3::new(0.2, 0.7, 0.4)),
        ] {
            let omega: f64 = d.direction_rule(p, &spec).iter().map(|r| r.weight).sum();
            assert!((omega - 4.0 * PI).abs() < 1e-10, "{omega}");
        }
    }

    #[test]
    fn exterior_cone_rule_covers_apparent_solid_angle() {
        let b = unit_ball();
        let spec = QuadratureSpec::default();
        let dist: f64 = 1.5;
        let rule = b.direction_rule(Vec3::new(0.0, 0.0, dist), &spec);
        let omega: f64 = rule.iter().map(|r| r.weight).sum();
        let cos_max = (1.0 - 1.0 / (dist * dist)).sqrt();
        let exact = 2.0 * PI * (1.0 - cos_max);
        assert!((omega - exact).abs() < 1e-12, "{omega} vs {exact}");
    }

    fn unit_dir() -> impl Strategy<Value = Vec3> {
        (0.0..PI, 0.0..(2.0 * PI)).prop_map(|(t, p)| Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()))
    }

    proptest! {
        #[test]
        fn exit_point_is_on_boundary(
            r in 0.0..0.99f64, dir_p in unit_dir(), dir in unit_dir(), box_pt in (0.01..0.99f64, 0.01..0.99f64, 0.01..0.99f64)
        ) {
            let cases = [
                (unit_ball(), dir_p * r),
                (unit_cube(), Vec3::new(box_pt.0, box_pt.1, box_pt.2)),
            ];
            for (d, p0) in cases {
                let t = ray_exit_distance(&d, p0, dir).unwrap();
                prop_assert!(t > 0.0);
                prop_assert!(d.contains(p0 + dir * ((1.0 - 1e-9) * t)));
                prop_assert!(!d.contains(p0 + dir * ((1.0 + 1e-9) * t)));
            }
        }

        #[test]
        fn ball_exit_distance_is_lipschitz(
            r in 0.0..0.8f64, dir_p in unit_dir(), dir in unit_dir(),
            dp in (-1e-3..1e-3f64, -1e-3..1e-3f64, -1e-3..1e-3f64),
            dd in (-1e-3..1e-3f64, -1e-3..1e-3f64, -1e-3..1e-3f64)
        ) {
            let b = unit_ball();
            let p0 = dir_p * r;
            let dp = Vec3::new(dp.0, dp.1, dp.2);
            let dir2 = (dir + Vec3::new(dd.0, dd.1, dd.2)).normalized();
            let t1 = ray_exit_distance(&b, p0, dir).unwrap();
            let t2 = ray_exit_distance(&b, p0 + dp, dir2).unwrap();
            let delta = dp.norm() + (dir2 - dir).norm();
            prop_assert!((t1 - t2).abs() <= 10.0 * delta + 1e-14);
        }
    }
}
