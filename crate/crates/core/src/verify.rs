//! Numerical checks of the identities satisfied by the computed potentials
//! and fields: the four Maxwell equations, the Lorenz gauge, the wave
//! equations for the potentials, charge continuity and the Gauss flux law.
//!
//! Spatial derivatives are central differences of field or potential
//! evaluations (step `fd_step`). Second derivatives are never taken under
//! the integral. Time derivatives are exact: every harmonic term carries
//! `exp(-i omega t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::fields_general;
use crate::geometry::{Ball, Region, SpatialDomain, SurfaceMesh};
use crate::potentials::{check_clearance, potentials_general};
use crate::quadrature::{integrate_regular, QuadratureSpec};
use crate::retarded::{all_moments, Moments};
use crate::sources::{harmonic_continuity, SourceModel};
use crate::vector::{CVec3, Vec3};

/// Relative level at which quadrature evaluations at neighbouring points
/// disagree for reasons other than the smooth dependence on the point (each
/// point gets its own polar rule, and the sums round). Differencing
/// amplifies it by `1/h` per derivative; see [`ResidualReport::floor`].
/// Measured near `1e-12` on the built-in models.
const QUADRATURE_NOISE: f64 = 1e-11;

/// The residuals of one check, one value per identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `rot E + (1/c) dH/dt`, `rot H - (1/c) dE/dt - (4 pi/c) j`, `div H`,
    /// `div E - 4 pi rho`.
    pub maxwell: [f64; 4],
    /// `div A + (1/c) dphi/dt`.
    pub gauge: f64,
    /// `lap phi - (1/c^2) d2phi/dt2 + 4 pi rho`.
    pub wave_phi: f64,
    /// `lap A - (1/c^2) d2A/dt2 + (4 pi/c) j`.
    pub wave_a: f64,
    /// `div j + drho/dt`.
    pub continuity: f64,
}

/// Names of the residual kinds, in [`Residuals::values`] order.
pub const RESIDUAL_NAMES: [&str; 8] = [
    "maxwell_1",
    "maxwell_2",
    "maxwell_3",
    "maxwell_4",
    "gauge",
    "wave_phi",
    "wave_a",
    "continuity",
];

impl Residuals {
    pub fn values(&self) -> [f64; 8] {
        let m = self.maxwell;
        [
            m[0],
            m[1],
            m[2],
            m[3],
            self.gauge,
            self.wave_phi,
            self.wave_a,
            self.continuity,
        ]
    }

    pub fn from_values(v: [f64; 8]) -> Self {
        Self {
            maxwell: [v[0], v[1], v[2], v[3]],
            gauge: v[4],
            wave_phi: v[5],
            wave_a: v[6],
            continuity: v[7],
        }
    }

    pub fn get(&self, kind: ResidualKind) -> f64 {
        self.values()[kind as usize]
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = (self.values(), o.values());
        Self::from_values(std::array::from_fn(|i| f(a[i], b[i])))
    }

    /// Elementwise maximum.
    pub fn max(&self, o: &Self) -> Self {
        self.zip(o, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.values().iter().all(|v| v.is_finite() && *v >= 0.0)
    }
}

/// One residual identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    #[serde(rename = "maxwell_1")]
    Maxwell1,
    #[serde(rename = "maxwell_2")]
    Maxwell2,
    #[serde(rename = "maxwell_3")]
    Maxwell3,
    #[serde(rename = "maxwell_4")]
    Maxwell4,
    Gauge,
    WavePhi,
    WaveA,
    Continuity,
}

impl ResidualKind {
    pub const ALL: [ResidualKind; 8] = [
        ResidualKind::Maxwell1,
        ResidualKind::Maxwell2,
        ResidualKind::Maxwell3,
        ResidualKind::Maxwell4,
        ResidualKind::Gauge,
        ResidualKind::WavePhi,
        ResidualKind::WaveA,
        ResidualKind::Continuity,
    ];

    pub fn name(self) -> &'static str {
        RESIDUAL_NAMES[self as usize]
    }
}

/// Residual norms over a probe set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Max over probes of the absolute residual norms.
    pub absolute: Residuals,
    /// Max over probes of `absolute / max(source scale, 1)`, where the
    /// source scale is `4 pi |rho|` or `(4 pi / c) |j|` at the probe for the
    /// identities that carry a source term.
    pub normalized: Residuals,
    /// Estimated noise floor of `normalized`: residuals at this level
    /// cannot be expected to decrease under refinement.
    pub floor: Residuals,
    /// Normalized residuals per probe, in probe order.
    pub per_probe: Vec<Residuals>,
    /// Signed relative Gauss-law mismatch, when a flux test was run.
    pub flux_mismatch: Option<f64>,
    pub probe_points: Vec<Vec3>,
    pub spec_used: QuadratureSpec,
    pub time: f64,
}

struct ProbeResult {
    absolute: Residuals,
    normalized: Residuals,
    floor: Residuals,
}

fn stencil(p: Vec3, h: f64) -> [Vec3; 7] {
    [
        p,
        p + Vec3::X * h,
        p - Vec3::X * h,
        p + Vec3::Y * h,
        p - Vec3::Y * h,
        p + Vec3::Z * h,
        p - Vec3::Z * h,
    ]
}

/// Central difference of component `c` along axis `i` from stencil values.
fn d<T: Copy>(v: &[T; 7], i: usize, h: f64, get: impl Fn(T) -> Complex64) -> Complex64 {
    (get(v[1 + 2 * i]) - get(v[2 + 2 * i])) / (2.0 * h)
}

fn div(v: &[CVec3; 7], h: f64) -> Complex64 {
    (0..3).map(|i| d(v, i, h, |x: CVec3| x[i])).sum()
}

fn curl(v: &[CVec3; 7], h: f64) -> CVec3 {
    let g = |i: usize, c: usize| d(v, i, h, |x: CVec3| x[c]);
    CVec3::new(g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0))
}

fn laplacian<T: Copy>(v: &[T; 7], h: f64, get: impl Fn(T) -> Complex64) -> Complex64 {
    let centre = get(v[0]);
    (1..7).map(|n| get(v[n]) - centre).sum::<Complex64>() / (h * h)
}

fn probe_residuals(model: &SourceModel, p: Vec3, t: f64, spec: &QuadratureSpec) -> ProbeResult {
    let h = spec.fd_step;
    let c = model.constants().c;
    let with_wave = model.domain().signed_distance(p).abs() > 3.0 * h;
    let inside = model.domain().contains(p);
    let points = stencil(p, h);
    let moments: Vec<Vec<(f64, Complex64, Moments)>> = points.iter().map(|&q| all_moments(model, q, spec)).collect();
    let harmonics = model.harmonics();

    let zero = Complex64::new(0.0, 0.0);
    let (mut m1, mut m2, mut m4) = (CVec3::ZERO, CVec3::ZERO, zero);
    let (mut m3, mut gauge, mut wphi, mut cont) = (zero, zero, zero, zero);
    let mut wa = CVec3::ZERO;
    let (mut rho_t, mut j_t) = (zero, CVec3::ZERO);
    let (mut field_mag, mut pot_mag, mut src_mag) = (0.0f64, 0.0f64, 0.0f64);

    for (n, hm) in harmonics.iter().enumerate() {
        let omega = hm.omega;
        let k = model.constants().wavenumber(omega);
        let dt = Complex64::new(0.0, -omega);
        let ph = hm.phase(t);
        let at = |s: usize| moments[s][n].2;
        let e: [CVec3; 7] = std::array::from_fn(|s| at(s).e(k));
        let hf: [CVec3; 7] = std::array::from_fn(|s| at(s).h());
        let a: [CVec3; 7] = std::array::from_fn(|s| at(s).a);
        let phi: [Complex64; 7] = std::array::from_fn(|s| at(s).phi);
        let (rho, j) = if inside {
            (hm.charge(p), hm.current(p))
        } else {
            (zero, CVec3::ZERO)
        };

        m1 += (curl(&e, h) + hf[0] * (dt / c)) * ph;
        m2 += (curl(&hf, h) - e[0] * (dt / c) - j * (4.0 * PI / c)) * ph;
        m3 += div(&hf, h) * ph;
        m4 += (div(&e, h) - 4.0 * PI * rho) * ph;
        gauge += (div(&a, h) + dt / c * phi[0]) * ph;
        wphi += (laplacian(&phi, h, |x| x) + k * k * phi[0] + 4.0 * PI * rho) * ph;
        wa += CVec3::new(
            laplacian(&a, h, |x| x[0]),
            laplacian(&a, h, |x| x[1]),
            laplacian(&a, h, |x| x[2]),
        ) * ph
            + (a[0] * (k * k) + j * (4.0 * PI / c)) * ph;
        if inside {
            cont += harmonic_continuity(hm, p, h) * ph;
        }
        rho_t += rho * ph;
        j_t += j * ph;

        let wabs = hm.weight.norm();
        for s in 0..7 {
            field_mag = field_mag.max(wabs * e[s].norm().max(hf[s].norm()));
            pot_mag = pot_mag.max(wabs * phi[s].norm().max(a[s].norm()));
        }
        src_mag = src_mag.max(wabs * j.norm().max(omega.abs() * rho.norm()));
    }

    let (wphi, wa_norm) = if with_wave {
        (wphi.norm(), wa.norm())
    } else {
        (0.0, 0.0)
    };
    let absolute = Residuals {
        maxwell: [m1.norm(), m2.norm(), m3.norm(), m4.norm()],
        gauge: gauge.norm(),
        wave_phi: wphi,
        wave_a: wa_norm,
        continuity: cont.norm(),
    };
    let s_rho = (4.0 * PI * rho_t.norm()).max(1.0);
    let s_j = (4.0 * PI / c * j_t.norm()).max(1.0);
    let scales = Residuals {
        maxwell: [1.0, s_j, 1.0, s_rho],
        gauge: 1.0,
        wave_phi: s_rho,
        wave_a: s_j,
        continuity: 1.0,
    };
    let normalized = absolute.zip(&scales, |r, s| r / s);
    let first = QUADRATURE_NOISE * field_mag / h;
    let second = QUADRATURE_NOISE * pot_mag / (h * h);
    let floor = Residuals {
        maxwell: [first; 4],
        gauge: QUADRATURE_NOISE * pot_mag / h,
        wave_phi: if with_wave { second } else { 0.0 },
        wave_a: if with_wave { second } else { 0.0 },
        continuity: QUADRATURE_NOISE * src_mag / h,
    }
    .zip(&scales, |r, s| r / s);
    ProbeResult {
        absolute,
        normalized,
        floor,
    }
}

fn assemble(
    model: &SourceModel,
    probes: &[Vec3],
    t: f64,
    spec: &QuadratureSpec,
    margin: f64,
) -> Result<ResidualReport> {
    for &p in probes {
        check_clearance(model, p, margin)?;
    }
    let results: Vec<ProbeResult> = probes.par_iter().map(|&p| probe_residuals(model, p, t, spec)).collect();
    let mut report = ResidualReport {
        absolute: Residuals::default(),
        normalized: Residuals::default(),
        floor: Residuals::default(),
        per_probe: Vec::with_capacity(results.len()),
        flux_mismatch: None,
        probe_points: probes.to_vec(),
        spec_used: *spec,
        time: t,
    };
    for r in results {
        report.absolute = report.absolute.max(&r.absolute);
        report.normalized = report.normalized.max(&r.normalized);
        report.floor = report.floor.max(&r.floor);
        report.per_probe.push(r.normalized);
    }
    Ok(report)
}

/// Every residual at every probe, reported as max-norms over the probes.
///
/// Probes must lie farther than `2 fd_step` from the boundary; the wave
/// residuals are only taken at probes farther than `3 fd_step` (others
/// contribute zero to them).
pub fn maxwell_residuals(
    model: &SourceModel,
    probes: &[Vec3],
    t: f64,
    spec: &QuadratureSpec,
) -> Result<ResidualReport> {
    assemble(model, probes, t, spec, 2.0 * spec.fd_step)
}

/// `(wave_phi, wave_a)` absolute max-norms; probes must lie farther than
/// `3 fd_step` from the boundary.
pub fn wave_residual(model: &SourceModel, probes: &[Vec3], t: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let r = assemble(model, probes, t, spec, 3.0 * spec.fd_step)?;
    Ok((r.absolute.wave_phi, r.absolute.wave_a))
}

/// Flux of `Re E` (at `t = 0`) through `enclosing`, and `4 pi` times the
/// charge it encloses.
///
/// The enclosed charge counts the domain once per winding of the mesh
/// around the domain centre, so a mesh that misses the domain expects zero.
pub fn gauss_flux_test(model: &SourceModel, enclosing: &SurfaceMesh, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    for s in &enclosing.samples {
        if model.domain().signed_distance(s.point) <= spec.fd_step {
            return Err(Error::NearBoundary {
                point: s.point,
                margin: spec.fd_step,
            });
        }
    }
    let normal_e: Vec<f64> = enclosing
        .samples
        .par_iter()
        .map(|s| {
            let f = fields_general(model, s.point, 0.0, spec).expect("fields are defined everywhere");
            f.e.re().dot(s.normal) * s.weight
        })
        .collect();
    let flux = normal_e.iter().sum();

    let centre = model.domain().center();
    let solid_angle: f64 = enclosing
        .samples
        .iter()
        .map(|s| {
            let v = s.point - centre;
            v.dot(s.normal) / v.norm().powi(3) * s.weight
        })
        .sum();
    let winding = (solid_angle / (4.0 * PI)).round();
    let harmonics = model.harmonics();
    let charge: f64 = integrate_regular(
        model.domain(),
        |p| harmonics.iter().map(|h| (h.charge(p) * h.weight).re).sum::<f64>(),
        spec,
    );
    Ok((flux, 4.0 * PI * winding * charge))
}

/// `(flux - expected) / max(|expected|, 1)`: relative for appreciable
/// enclosed charge, absolute when the charge is small or cancels.
pub fn flux_mismatch(flux: f64, expected: f64) -> f64 {
    (flux - expected) / expected.abs().max(1.0)
}

/// Probe set used when a scenario names none: a 3×3×3 grid well inside the
/// domain plus six axis points at twice the domain radius.
pub fn default_probes(domain: &SpatialDomain) -> Vec<Vec3> {
    let (centre, radius) = domain.bounding_sphere();
    let mut out = Vec::with_capacity(33);
    let offsets = [-1.0, 0.0, 1.0];
    match domain {
        SpatialDomain::Ball(b) => {
            let s = 0.35 * b.radius;
            for &k in &offsets {
                for &j in &offsets {
                    for &i in &offsets {
                        out.push(b.center + Vec3::new(i, j, k) * s);
                    }
                }
            }
        }
        SpatialDomain::Box(c) => {
            let half = c.extent() * 0.25;
            for &k in &offsets {
                for &j in &offsets {
                    for &i in &offsets {
                        out.push(c.center() + Vec3::new(i * half.x, j * half.y, k * half.z));
                    }
                }
            }
        }
    }
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            out.push(centre + Vec3::axis(axis) * (sign * 2.0 * radius));
        }
    }
    out
}

/// Enclosing sphere of radius `radius` about the domain centre.
pub fn enclosing_sphere(domain: &SpatialDomain, radius: f64, resolution: usize) -> Result<SurfaceMesh> {
    Ok(Ball::new(domain.center(), radius)?.boundary_mesh(resolution))
}

/// The quantity tracked by a convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    /// `|flux - expected|` through a sphere of the given radius, with mesh
    /// resolution `n_polar / 2`.
    Flux { radius: f64 },
    /// `|phi(probe, 0) - reference|`.
    ScalarPotential { reference: Complex64 },
    /// The normalized residual at the probe.
    Residual(ResidualKind),
}

/// Errors of one check across successively refined specs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub levels: Vec<(QuadratureSpec, f64)>,
    /// `log(e_{n+1}/e_n) / log(N_{n+1}/N_n)` with `N` the polar node count;
    /// `None` where an error is zero.
    pub slopes: Vec<Option<f64>>,
}

impl ConvergenceRecord {
    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.1).collect()
    }

    /// Every level is no worse than the previous one, or below `floor`.
    pub fn is_monotone(&self, floor: f64) -> bool {
        self.errors().windows(2).all(|w| w[1] <= w[0] || w[1] <= floor)
    }
}

fn node_count(s: &QuadratureSpec) -> f64 {
    (s.n_radial * s.n_polar * s.n_azimuth) as f64
}

fn is_refinement(a: &QuadratureSpec, b: &QuadratureSpec) -> bool {
    let no_coarser = b.n_radial >= a.n_radial
        && b.n_polar >= a.n_polar
        && b.n_azimuth >= a.n_azimuth
        && b.n_regular >= a.n_regular
        && b.fd_step <= a.fd_step;
    no_coarser && a != b
}

/// Evaluates `check` at every level.
pub fn convergence_study(
    check: Check,
    model: &SourceModel,
    probe: Vec3,
    levels: &[QuadratureSpec],
) -> Result<ConvergenceRecord> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    for l in levels {
        l.validate()?;
    }
    if let Some(w) = levels.windows(2).find(|w| !is_refinement(&w[0], &w[1])) {
        return Err(Error::InvalidSpec(format!(
            "convergence levels must be successively refined: {:?} does not refine {:?}",
            w[1], w[0]
        )));
    }
    let mut out = Vec::with_capacity(levels.len());
    for spec in levels {
        let err = match check {
            Check::Flux { radius } => {
                let mesh = enclosing_sphere(model.domain(), radius, (spec.n_polar / 2).max(4))?;
                let (flux, expected) = gauss_flux_test(model, &mesh, spec)?;
                (flux - expected).abs()
            }
            Check::ScalarPotential { reference } => {
                (potentials_general(model, probe, 0.0, spec)?.phi - reference).norm()
            }
            Check::Residual(kind) => {
                let r = maxwell_residuals(model, &[probe], 0.0, spec)?;
                r.normalized.get(kind)
            }
        };
        out.push((*spec, err));
    }
    let slopes = out
        .windows(2)
        .map(|w| {
            let (e0, e1) = (w[0].1, w[1].1);
            (e0 > 0.0 && e1 > 0.0).then(|| (e1 / e0).ln() / (node_count(&w[1].0) / node_count(&w[0].0)).ln())
        })
        .collect();
    Ok(ConvergenceRecord { levels: out, slopes })
}

/// Acceptance thresholds on the normalized residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub maxwell: [f64; 4],
    pub gauge: f64,
    pub wave_phi: f64,
    pub wave_a: f64,
    pub continuity: f64,
    /// Bound on `|flux_mismatch|`.
    pub flux: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            maxwell: [1e-4; 4],
            gauge: 1e-4,
            wave_phi: 1e-4,
            wave_a: 1e-4,
            continuity: 1e-6,
            flux: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn as_residuals(&self) -> Residuals {
        Residuals {
            maxwell: self.maxwell,
            gauge: self.gauge,
            wave_phi: self.wave_phi,
            wave_a: self.wave_a,
            continuity: self.continuity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = self.as_residuals().values().to_vec();
        all.push(self.flux);
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidSpec("tolerances must be positive and finite".into()))
        }
    }

    /// Descriptions of every exceeded threshold; empty when all pass.
    pub fn failures(&self, report: &ResidualReport) -> Vec<String> {
        let tol = self.as_residuals().values();
        let got = report.normalized.values();
        let mut out: Vec<String> = RESIDUAL_NAMES
            .iter()
            .enumerate()
            .filter(|&(i, _)| !(got[i] <= tol[i]))
            .map(|(i, name)| format!("{name} = {:.3e} exceeds {:.3e}", got[i], tol[i]))
            .collect();
        if let Some(m) = report.flux_mismatch {
            if !(m.abs() <= self.flux) {
                out.push(format!("flux mismatch = {m:.3e} exceeds {:.3e}", self.flux));
            }
        }
        out
    }
}
