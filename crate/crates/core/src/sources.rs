//! Charge and current densities for the four temporal cases, and the
//! checks that a source conserves charge and keeps its current tangent to
//! the boundary of its support.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Region, SpatialDomain, SurfaceMesh};
use crate::vector::{CVec3, Vec3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical constants of the unit system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Light speed.
    pub c: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

impl Constants {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSource(format!("light speed must be positive, got {c}")));
        }
        Ok(Self { c })
    }

    /// `k = omega / c`.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / self.c
    }
}

/// A (complex) charge density profile.
pub trait ChargeDensity: Send + Sync {
    fn value(&self, p: Vec3) -> Complex64;
}

/// A (complex) current density profile.
pub trait CurrentDensity: Send + Sync {
    fn value(&self, p: Vec3) -> CVec3;

    /// Exact divergence, when the profile knows it.
    fn divergence(&self, _p: Vec3) -> Option<Complex64> {
        None
    }
}

/// Charge density backed by a closure.
pub struct FnCharge<F>(pub F);

impl<F> ChargeDensity for FnCharge<F>
where
    F: Fn(Vec3) -> Complex64 + Send + Sync,
{
    fn value(&self, p: Vec3) -> Complex64 {
        (self.0)(p)
    }
}

/// Current density backed by a closure; divergence by finite differences.
pub struct FnCurrent<F>(pub F);

impl<F> CurrentDensity for FnCurrent<F>
where
    F: Fn(Vec3) -> CVec3 + Send + Sync,
{
    fn value(&self, p: Vec3) -> CVec3 {
        (self.0)(p)
    }
}

/// Constant density; the model's domain cuts it off.
#[derive(Clone, Copy, Debug)]
pub struct UniformCharge {
    pub rho0: f64,
}

impl ChargeDensity for UniformCharge {
    fn value(&self, _p: Vec3) -> Complex64 {
        self.rho0.into()
    }
}

/// `amplitude * (1 - r^2/R^2)` about `center`.
#[derive(Clone, Copy, Debug)]
pub struct ParabolicCharge {
    pub ball: Ball,
    pub amplitude: f64,
}

impl ChargeDensity for ParabolicCharge {
    fn value(&self, p: Vec3) -> Complex64 {
        let w = 1.0 - (p - self.ball.center).norm_squared() / self.ball.radius.powi(2);
        (self.amplitude * w).into()
    }
}

/// `amplitude * s * (1 - r^2/R^2) e_phi`, with `s` the distance to the
/// z-axis through the centre. Divergence-free.
#[derive(Clone, Copy, Debug)]
pub struct AzimuthalCurrent {
    pub ball: Ball,
    pub amplitude: f64,
}

impl CurrentDensity for AzimuthalCurrent {
    fn value(&self, p: Vec3) -> CVec3 {
        let q = p - self.ball.center;
        let w = self.amplitude * (1.0 - q.norm_squared() / self.ball.radius.powi(2));
        CVec3::from_real(Vec3::new(-q.y * w, q.x * w, 0.0))
    }

    fn divergence(&self, _p: Vec3) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
}

/// `amplitude * (1 - r^2/R^2)^2 e_z`: vanishes with its gradient on the sphere.
#[derive(Clone, Copy, Debug)]
pub struct PolarizationCurrent {
    pub ball: Ball,
    pub amplitude: f64,
}

impl PolarizationCurrent {
    fn exact_divergence(&self, p: Vec3) -> f64 {
        let q = p - self.ball.center;
        let r2 = self.ball.radius.powi(2);
        -4.0 * self.amplitude * q.z * (1.0 - q.norm_squared() / r2) / r2
    }
}

impl CurrentDensity for PolarizationCurrent {
    fn value(&self, p: Vec3) -> CVec3 {
        let w = 1.0 - (p - self.ball.center).norm_squared() / self.ball.radius.powi(2);
        CVec3::from_real(Vec3::Z * (self.amplitude * w * w))
    }

    fn divergence(&self, p: Vec3) -> Option<Complex64> {
        Some(self.exact_divergence(p).into())
    }
}

/// The charge amplitude that balances a [`PolarizationCurrent`] at
/// frequency `omega`: `rho_a = div j_a / (i omega)`.
#[derive(Clone, Copy, Debug)]
pub struct PolarizationCharge {
    pub current: PolarizationCurrent,
    pub omega: f64,
}

impl ChargeDensity for PolarizationCharge {
    fn value(&self, p: Vec3) -> Complex64 {
        Complex64::from(self.current.exact_divergence(p)) / (I * self.omega)
    }
}

/// Spatially constant current.
#[derive(Clone, Copy, Debug)]
pub struct UniformCurrent {
    pub value: Vec3,
}

impl CurrentDensity for UniformCurrent {
    fn value(&self, _p: Vec3) -> CVec3 {
        CVec3::from_real(self.value)
    }

    fn divergence(&self, _p: Vec3) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
}

/// Identically zero current.
#[derive(Clone, Copy, Debug)]
pub struct NoCurrent;

impl CurrentDensity for NoCurrent {
    fn value(&self, _p: Vec3) -> CVec3 {
        CVec3::ZERO
    }

    fn divergence(&self, _p: Vec3) -> Option<Complex64> {
        Some(Complex64::new(0.0, 0.0))
    }
}

/// Complex amplitudes of a source oscillating as `exp(-i omega t)`.
#[derive(Clone)]
pub struct Monochromatic {
    /// Angular frequency; nonzero. A negative value is the conjugate branch
    /// used when synthesizing real signals from a band.
    pub omega: f64,
    pub rho_a: Arc<dyn ChargeDensity>,
    pub j_a: Arc<dyn CurrentDensity>,
}

/// One term of a discretized frequency band.
#[derive(Clone)]
pub struct BandComponent {
    pub weight: Complex64,
    pub source: Monochromatic,
}

#[derive(Clone)]
pub enum SourceKind {
    Electrostatic {
        rho: Arc<dyn ChargeDensity>,
    },
    Magnetostatic {
        /// Static charge, if any.
        rho: Option<Arc<dyn ChargeDensity>>,
        j: Arc<dyn CurrentDensity>,
    },
    Monochromatic(Monochromatic),
    BandLimited(Vec<BandComponent>),
}

/// A time-harmonic term of a source: `weight * exp(-i omega t) * (rho, j)`.
/// Static sources are a single term with `omega = 0`.
#[derive(Clone, Copy)]
pub struct Harmonic<'a> {
    pub omega: f64,
    pub weight: Complex64,
    pub rho: Option<&'a dyn ChargeDensity>,
    pub j: Option<&'a dyn CurrentDensity>,
}

impl Harmonic<'_> {
    /// `weight * exp(-i omega t)`.
    pub fn phase(&self, t: f64) -> Complex64 {
        self.weight * Complex64::from_polar(1.0, -self.omega * t)
    }

    pub fn charge(&self, p: Vec3) -> Complex64 {
        self.rho.map_or(Complex64::new(0.0, 0.0), |r| r.value(p))
    }

    pub fn current(&self, p: Vec3) -> CVec3 {
        self.j.map_or(CVec3::ZERO, |j| j.value(p))
    }
}

/// Charge and current densities supported on a finite domain.
#[derive(Clone)]
pub struct SourceModel {
    domain: SpatialDomain,
    constants: Constants,
    kind: SourceKind,
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceModel")
            .field("domain", &self.domain)
            .field("constants", &self.constants)
            .field("variant", &self.variant_name())
            .finish()
    }
}

impl SourceModel {
    pub fn new(domain: SpatialDomain, kind: SourceKind) -> Result<Self> {
        domain.validate()?;
        let check_omega = |omega: f64| {
            if omega == 0.0 || !omega.is_finite() {
                Err(Error::InvalidSource(format!(
                    "angular frequency must be finite and nonzero, got {omega}"
                )))
            } else {
                Ok(())
            }
        };
        match &kind {
            SourceKind::Monochromatic(m) => check_omega(m.omega)?,
            SourceKind::BandLimited(components) => {
                if components.is_empty() {
                    return Err(Error::InvalidSource("band needs at least one component".into()));
                }
                for (i, c) in components.iter().enumerate() {
                    check_omega(c.source.omega)?;
                    if !c.weight.is_finite() {
                        return Err(Error::InvalidSource(format!("band weight {i} is not finite")));
                    }
                    if components[..i].iter().any(|o| o.source.omega == c.source.omega) {
                        return Err(Error::InvalidSource(format!(
                            "band frequencies must be distinct; {} repeats",
                            c.source.omega
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(Self {
            domain,
            constants: Constants::default(),
            kind,
        })
    }

    pub fn with_constants(mut self, constants: Constants) -> Self {
        self.constants = constants;
        self
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            SourceKind::Electrostatic { .. } => "electrostatic",
            SourceKind::Magnetostatic { .. } => "magnetostatic",
            SourceKind::Monochromatic(_) => "monochromatic",
            SourceKind::BandLimited(_) => "band-limited",
        }
    }

    pub fn carries_current(&self) -> bool {
        !matches!(self.kind, SourceKind::Electrostatic { .. })
    }

    /// The source as a list of time-harmonic terms.
    pub fn harmonics(&self) -> Vec<Harmonic<'_>> {
        let one = Complex64::new(1.0, 0.0);
        fn mono(m: &Monochromatic, weight: Complex64) -> Harmonic<'_> {
            Harmonic {
                omega: m.omega,
                weight,
                rho: Some(&*m.rho_a),
                j: Some(&*m.j_a),
            }
        }
        match &self.kind {
            SourceKind::Electrostatic { rho } => vec![Harmonic {
                omega: 0.0,
                weight: one,
                rho: Some(&**rho),
                j: None,
            }],
            SourceKind::Magnetostatic { rho, j } => vec![Harmonic {
                omega: 0.0,
                weight: one,
                rho: rho.as_deref(),
                j: Some(&**j),
            }],
            SourceKind::Monochromatic(m) => vec![mono(m, one)],
            SourceKind::BandLimited(cs) => cs.iter().map(|c| mono(&c.source, c.weight)).collect(),
        }
    }

    /// Band `(omega, weight)` pairs (a single unit-weight term otherwise).
    pub fn band(&self) -> Vec<(f64, Complex64)> {
        self.harmonics().iter().map(|h| (h.omega, h.weight)).collect()
    }

    /// Charge density at `(p, t)`; exactly zero off the open domain.
    pub fn eval_charge(&self, p: Vec3, t: f64) -> Complex64 {
        if !self.domain.contains(p) {
            return Complex64::new(0.0, 0.0);
        }
        self.harmonics()
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, h| acc + h.charge(p) * h.phase(t))
    }

    /// Current density at `(p, t)`; exactly zero off the open domain.
    pub fn eval_current(&self, p: Vec3, t: f64) -> CVec3 {
        if !self.domain.contains(p) {
            return CVec3::ZERO;
        }
        self.harmonics()
            .iter()
            .fold(CVec3::ZERO, |acc, h| acc + h.current(p) * h.phase(t))
    }

    /// The same model with every density multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> SourceModel {
        let mut out = self.clone();
        let scale_rho = |r: &Arc<dyn ChargeDensity>| -> Arc<dyn ChargeDensity> {
            let r = r.clone();
            Arc::new(FnCharge(move |p| r.value(p) * factor))
        };
        let scale_j = |j: &Arc<dyn CurrentDensity>| -> Arc<dyn CurrentDensity> {
            Arc::new(ScaledCurrent {
                inner: j.clone(),
                factor,
            })
        };
        let scale_mono = |m: &Monochromatic| Monochromatic {
            omega: m.omega,
            rho_a: scale_rho(&m.rho_a),
            j_a: scale_j(&m.j_a),
        };
        out.kind = match &self.kind {
            SourceKind::Electrostatic { rho } => SourceKind::Electrostatic { rho: scale_rho(rho) },
            SourceKind::Magnetostatic { rho, j } => SourceKind::Magnetostatic {
                rho: rho.as_ref().map(scale_rho),
                j: scale_j(j),
            },
            SourceKind::Monochromatic(m) => SourceKind::Monochromatic(scale_mono(m)),
            SourceKind::BandLimited(cs) => SourceKind::BandLimited(
                cs.iter()
                    .map(|c| BandComponent {
                        weight: c.weight,
                        source: scale_mono(&c.source),
                    })
                    .collect(),
            ),
        };
        out
    }

    /// Each band component as a standalone monochromatic model (with its
    /// weight). Non-band models yield themselves with unit weight.
    pub fn components(&self) -> Vec<(Complex64, SourceModel)> {
        match &self.kind {
            SourceKind::BandLimited(cs) => cs
                .iter()
                .map(|c| {
                    let m = SourceModel {
                        domain: self.domain,
                        constants: self.constants,
                        kind: SourceKind::Monochromatic(c.source.clone()),
                    };
                    (c.weight, m)
                })
                .collect(),
            _ => vec![(Complex64::new(1.0, 0.0), self.clone())],
        }
    }
}

struct ScaledCurrent {
    inner: Arc<dyn CurrentDensity>,
    factor: f64,
}

impl CurrentDensity for ScaledCurrent {
    fn value(&self, p: Vec3) -> CVec3 {
        self.inner.value(p) * self.factor
    }
    fn divergence(&self, p: Vec3) -> Option<Complex64> {
        self.inner.divergence(p).map(|d| d * self.factor)
    }
}

/// Uniform charge density `rho0` in a ball of radius `radius` at the origin.
pub fn uniform_ball_charge(radius: f64, rho0: f64) -> Result<SourceModel> {
    uniform_ball_charge_in(Ball::new(Vec3::ZERO, radius)?, rho0)
}

pub fn uniform_ball_charge_in(ball: Ball, rho0: f64) -> Result<SourceModel> {
    finite("rho0", rho0)?;
    SourceModel::new(
        SpatialDomain::Ball(ball),
        SourceKind::Electrostatic {
            rho: Arc::new(UniformCharge { rho0 }),
        },
    )
}

/// Uniform ball carrying total charge `q`.
pub fn uniform_ball_charge_with_total(radius: f64, q: f64) -> Result<SourceModel> {
    let ball = Ball::new(Vec3::ZERO, radius)?;
    uniform_ball_charge_in(ball, q / crate::geometry::Region::volume(&ball))
}

/// Uniform charge density filling an arbitrary domain.
pub fn uniform_charge(domain: SpatialDomain, rho0: f64) -> Result<SourceModel> {
    finite("rho0", rho0)?;
    SourceModel::new(
        domain,
        SourceKind::Electrostatic {
            rho: Arc::new(UniformCharge { rho0 }),
        },
    )
}

/// Static azimuthal current `amplitude * s * (1 - r^2/R^2) e_phi`.
pub fn azimuthal_ball_current(radius: f64, amplitude: f64) -> Result<SourceModel> {
    azimuthal_ball_current_in(Ball::new(Vec3::ZERO, radius)?, amplitude)
}

pub fn azimuthal_ball_current_in(ball: Ball, amplitude: f64) -> Result<SourceModel> {
    finite("amplitude", amplitude)?;
    SourceModel::new(
        SpatialDomain::Ball(ball),
        SourceKind::Magnetostatic {
            rho: None,
            j: Arc::new(AzimuthalCurrent { ball, amplitude }),
        },
    )
}

/// Oscillating current `amplitude * (1 - r^2/R^2)^2 e_z` with the charge
/// amplitude that conserves charge.
pub fn polarization_ball_current(radius: f64, omega: f64, amplitude: f64) -> Result<SourceModel> {
    polarization_ball_current_in(Ball::new(Vec3::ZERO, radius)?, omega, amplitude)
}

pub fn polarization_ball_current_in(ball: Ball, omega: f64, amplitude: f64) -> Result<SourceModel> {
    finite("amplitude", amplitude)?;
    let current = PolarizationCurrent { ball, amplitude };
    SourceModel::new(
        SpatialDomain::Ball(ball),
        SourceKind::Monochromatic(Monochromatic {
            omega,
            rho_a: Arc::new(PolarizationCharge { current, omega }),
            j_a: Arc::new(current),
        }),
    )
}

/// Oscillating charge `amplitude * (1 - r^2/R^2)` with no current. It
/// cannot conserve charge; useful to exercise validation.
pub fn oscillating_ball_charge(radius: f64, omega: f64, amplitude: f64) -> Result<SourceModel> {
    oscillating_ball_charge_in(Ball::new(Vec3::ZERO, radius)?, omega, amplitude)
}

pub fn oscillating_ball_charge_in(ball: Ball, omega: f64, amplitude: f64) -> Result<SourceModel> {
    finite("amplitude", amplitude)?;
    SourceModel::new(
        SpatialDomain::Ball(ball),
        SourceKind::Monochromatic(Monochromatic {
            omega,
            rho_a: Arc::new(ParabolicCharge { ball, amplitude }),
            j_a: Arc::new(NoCurrent),
        }),
    )
}

/// Static uniform current `amplitude * e_z` filling a ball. Divergence-free
/// but crosses the boundary.
pub fn uniform_ball_current(radius: f64, amplitude: f64) -> Result<SourceModel> {
    uniform_ball_current_in(Ball::new(Vec3::ZERO, radius)?, amplitude)
}

pub fn uniform_ball_current_in(ball: Ball, amplitude: f64) -> Result<SourceModel> {
    finite("amplitude", amplitude)?;
    SourceModel::new(
        SpatialDomain::Ball(ball),
        SourceKind::Magnetostatic {
            rho: None,
            j: Arc::new(UniformCurrent {
                value: Vec3::Z * amplitude,
            }),
        },
    )
}

/// Band from monochromatic models sharing one domain.
pub fn band_limited(components: Vec<(f64, Complex64, SourceModel)>) -> Result<SourceModel> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidSource("band needs at least one component".into()))?;
    let domain = first.2.domain;
    let constants = first.2.constants;
    let mut parts = Vec::with_capacity(components.len());
    for (omega, weight, model) in components {
        if model.domain != domain {
            return Err(Error::InvalidSource("band components must share one domain".into()));
        }
        if model.constants != constants {
            return Err(Error::InvalidSource(
                "band components must share one light speed".into(),
            ));
        }
        match model.kind {
            SourceKind::Monochromatic(m) if m.omega == omega => parts.push(BandComponent { weight, source: m }),
            SourceKind::Monochromatic(m) => {
                return Err(Error::InvalidSource(format!(
                    "band component declared at omega = {omega} but oscillates at {}",
                    m.omega
                )))
            }
            _ => return Err(Error::InvalidSource("band components must be monochromatic".into())),
        }
    }
    Ok(SourceModel::new(domain, SourceKind::BandLimited(parts))?.with_constants(constants))
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSource(format!("{name} must be finite, got {v}")))
    }
}

/// Central-difference divergence with step `h`.
pub fn fd_divergence(j: &dyn CurrentDensity, p: Vec3, h: f64) -> Complex64 {
    (0..3).fold(Complex64::new(0.0, 0.0), |acc, i| {
        let e = Vec3::axis(i) * h;
        acc + (j.value(p + e)[i] - j.value(p - e)[i]) / (2.0 * h)
    })
}

fn divergence(j: &dyn CurrentDensity, p: Vec3, h: f64) -> Complex64 {
    j.divergence(p).unwrap_or_else(|| fd_divergence(j, p, h))
}

/// Charge-conservation defect of one harmonic term (weight excluded):
/// `|div j_a - i omega rho_a|`.
pub(crate) fn harmonic_continuity(h: &Harmonic<'_>, p: Vec3, step: f64) -> Complex64 {
    let div = h.j.map_or(Complex64::new(0.0, 0.0), |j| divergence(j, p, step));
    div - I * h.omega * h.charge(p)
}

/// `|div j + d rho / dt|` at `(p, t)`.
///
/// The divergence uses the profile's exact hook when present, otherwise
/// central differences with step `h`. Time derivatives are exact: each term
/// carries `exp(-i omega t)`.
pub fn continuity_residual(model: &SourceModel, p: Vec3, t: f64, h: f64) -> Result<f64> {
    let sd = model.domain.signed_distance(p);
    if sd.abs() <= h {
        return Err(Error::NearBoundary { point: p, margin: h });
    }
    if sd > 0.0 {
        return Ok(0.0);
    }
    let total = model.harmonics().iter().fold(Complex64::new(0.0, 0.0), |acc, hm| {
        acc + harmonic_continuity(hm, p, h) * hm.phase(t)
    });
    Ok(total.norm())
}

/// Largest `|j . n|` over the mesh, sampled just inside the boundary.
pub fn tangency_max(model: &SourceModel, mesh: &SurfaceMesh) -> f64 {
    let nudge = 1e-8 * model.domain.diameter();
    let harmonics = model.harmonics();
    let mut worst: f64 = 0.0;
    for s in &mesh.samples {
        let p = s.point - s.normal * nudge;
        if !model.domain.contains(p) {
            continue;
        }
        for h in &harmonics {
            if h.j.is_some() {
                worst = worst.max(h.current(p).dot_real(s.normal).norm());
            }
        }
    }
    worst
}

/// Thresholds for accepting a source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hypotheses {
    /// Largest tolerated charge-conservation defect.
    pub continuity: f64,
    /// Largest tolerated normal current on the boundary.
    pub tangency: f64,
    /// Number of sample points for the continuity check.
    pub samples: usize,
    /// Boundary mesh resolution for the tangency check.
    pub mesh_resolution: usize,
}

impl Default for Hypotheses {
    fn default() -> Self {
        Self {
            continuity: 1e-4,
            tangency: 1e-6,
            samples: 100,
            mesh_resolution: 16,
        }
    }
}

/// Deterministic sample of interior points at least `margin` from the boundary.
pub fn interior_samples<R: Region + ?Sized>(domain: &R, count: usize, margin: f64, seed: u64) -> Vec<Vec3> {
    let (c, r) = domain.bounding_sphere();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let p = c + Vec3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r));
        if domain.signed_distance(p) < -margin {
            out.push(p);
        }
    }
    out
}

/// Rejects sources that violate charge conservation or boundary tangency.
///
/// Every harmonic term is checked on its own so that band components
/// cannot mask each other.
pub fn validate(model: &SourceModel, hyp: &Hypotheses, h: f64) -> Result<()> {
    let points = interior_samples(&model.domain, hyp.samples, 2.0 * h, 0x5eed);
    for hm in model.harmonics() {
        for &p in &points {
            let r = harmonic_continuity(&hm, p, h).norm();
            if !(r <= hyp.continuity) {
                return Err(Error::ContinuityViolated {
                    residual: r,
                    point: p,
                    tolerance: hyp.continuity,
                });
            }
        }
    }
    if model.carries_current() {
        let mesh = model.domain.boundary_mesh(hyp.mesh_resolution);
        let t = tangency_max(model, &mesh);
        if !(t <= hyp.tangency) {
            return Err(Error::TangencyViolated {
                value: t,
                tolerance: hyp.tangency,
            });
        }
    }
    Ok(())
}
