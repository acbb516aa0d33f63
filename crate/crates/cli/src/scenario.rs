//! Scenario files: strict JSON parsing followed by a semantic pass that
//! reports every violated constraint with its key path.

use std::fmt;

use num_complex::Complex64;
use retpot_core::geometry::{Ball, Cuboid};
use retpot_core::sources::{self, Hypotheses};
use retpot_core::verify::{ResidualKind, Tolerances};
use retpot_core::{Constants, QuadratureSpec, Region, SourceModel, SpatialDomain, Vec3};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One problem found in a scenario, located by its key path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Built-in source constructors, selected by the `source` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    UniformBallCharge {
        radius: Option<f64>,
        center: Option<Vec3>,
        rho0: Option<f64>,
        total_charge: Option<f64>,
    },
    /// Constant density filling the scenario domain (ball or box).
    UniformCharge {
        rho0: f64,
    },
    AzimuthalBallCurrent {
        radius: Option<f64>,
        center: Option<Vec3>,
        amplitude: f64,
    },
    PolarizationBallCurrent {
        radius: Option<f64>,
        center: Option<Vec3>,
        omega: f64,
        amplitude: f64,
    },
    OscillatingBallCharge {
        radius: Option<f64>,
        center: Option<Vec3>,
        omega: f64,
        amplitude: f64,
    },
    UniformBallCurrent {
        radius: Option<f64>,
        center: Option<Vec3>,
        amplitude: f64,
    },
    BandLimited {
        components: Vec<BandEntry>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEntry {
    pub omega: f64,
    /// `[re, im]`.
    pub weight: [f64; 2],
    pub source: SourceSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: Vec3,
    pub max: Vec3,
    pub counts: [usize; 3],
}

impl GridSpec {
    /// Grid points with x varying fastest, then y, then z.
    pub fn points(&self) -> Vec<Vec3> {
        let axis = |i: usize| -> Vec<f64> {
            let n = self.counts[i];
            let (lo, hi) = (self.min[i], self.max[i]);
            (0..n)
                .map(|k| {
                    if n == 1 {
                        lo
                    } else {
                        lo + (hi - lo) * k as f64 / (n - 1) as f64
                    }
                })
                .collect()
        };
        let (xs, ys, zs) = (axis(0), axis(1), axis(2));
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &z in &zs {
            for &y in &ys {
                for &x in &xs {
                    out.push(Vec3::new(x, y, z));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxSpec {
    /// Radii of the enclosing spheres about the domain centre; defaults to
    /// twice the domain's bounding radius.
    pub radii: Option<Vec<f64>>,
    pub resolution: usize,
}

impl Default for FluxSpec {
    fn default() -> Self {
        Self {
            radii: None,
            resolution: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Flux,
    ScalarPotential,
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

impl CheckName {
    pub fn residual(self) -> Option<ResidualKind> {
        Some(match self {
            CheckName::Maxwell1 => ResidualKind::Maxwell1,
            CheckName::Maxwell2 => ResidualKind::Maxwell2,
            CheckName::Maxwell3 => ResidualKind::Maxwell3,
            CheckName::Maxwell4 => ResidualKind::Maxwell4,
            CheckName::Gauge => ResidualKind::Gauge,
            CheckName::WavePhi => ResidualKind::WavePhi,
            CheckName::WaveA => ResidualKind::WaveA,
            CheckName::Continuity => ResidualKind::Continuity,
            CheckName::Flux | CheckName::ScalarPotential => return None,
        })
    }
}

/// Which parameters change between convergence levels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refine {
    /// Node counts doubled and `fd_step` halved.
    #[default]
    Both,
    Nodes,
    FdStep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub check: CheckName,
    /// Observation point for potential and residual checks; defaults to the
    /// domain centre.
    #[serde(default)]
    pub probe: Option<Vec3>,
    /// Exact potential at the probe, for `scalar_potential`.
    #[serde(default)]
    pub reference: Option<f64>,
    /// Sphere radius for `flux`; defaults as in the flux command.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub refine: Refine,
    /// Errors at or below this level count as converged.
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_levels() -> usize {
    3
}

fn default_floor() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputNames {
    pub potentials: String,
    pub fields: String,
    pub verify: String,
    pub flux: String,
    pub convergence: String,
}

impl Default for OutputNames {
    fn default() -> Self {
        Self {
            potentials: "potentials.csv".into(),
            fields: "fields.csv".into(),
            verify: "verify.json".into(),
            flux: "flux.json".into(),
            convergence: "convergence.json".into(),
        }
    }
}

/// The document as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub domain: Option<SpatialDomain>,
    pub source: SourceSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub hypotheses: Hypotheses,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Write only real parts in the fields CSV.
    #[serde(default)]
    pub real_only: bool,
    /// Verification probes; defaults to the domain's standard probe set.
    #[serde(default)]
    pub probes: Option<Vec<Vec3>>,
    #[serde(default)]
    pub verify_time: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub flux: FluxSpec,
    #[serde(default)]
    pub convergence: Option<ConvergenceSpec>,
    #[serde(default)]
    pub outputs: OutputNames,
}

fn default_times() -> Vec<f64> {
    vec![0.0]
}

/// A validated scenario with its source model built.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub model: SourceModel,
}

impl Scenario {
    pub fn flux_radii(&self) -> Vec<f64> {
        self.file
            .flux
            .radii
            .clone()
            .unwrap_or_else(|| vec![2.0 * self.model.domain().bounding_sphere().1])
    }

    pub fn probes(&self) -> Vec<Vec3> {
        self.file
            .probes
            .clone()
            .unwrap_or_else(|| retpot_core::verify::default_probes(self.model.domain()))
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<Issue>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| vec![syntax_issue(&e)])?;
    let mut issues = Vec::new();
    let model = check(&file, &mut issues);
    match model {
        Some(model) if issues.is_empty() => Ok(Scenario { file, model }),
        _ => Err(issues),
    }
}

fn syntax_issue(e: &serde_path_to_error::Error<serde_json::Error>) -> Issue {
    let mut path = e.path().to_string();
    let message = e.inner().to_string();
    // Inside tagged enums the path stops at the enum; name the key itself.
    if let Some(rest) = message.strip_prefix("unknown field `") {
        if let Some(key) = rest.split('`').next() {
            if !path.ends_with(key) {
                path = if path == "." {
                    key.to_string()
                } else {
                    format!("{path}.{key}")
                };
            }
        }
    }
    if path == "." || path == "?" {
        path = "(document)".into();
    }
    Issue::new(path, message)
}

fn finite(issues: &mut Vec<Issue>, path: &str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        issues.push(Issue::new(path, format!("must be finite, got {v}")));
        false
    }
}

fn positive(issues: &mut Vec<Issue>, path: &str, v: f64) -> bool {
    if v > 0.0 && v.is_finite() {
        true
    } else {
        issues.push(Issue::new(path, format!("must be positive, got {v}")));
        false
    }
}

fn check_vec(issues: &mut Vec<Issue>, path: &str, v: Vec3) -> bool {
    if v.is_finite() {
        true
    } else {
        issues.push(Issue::new(path, "components must be finite"));
        false
    }
}

fn check_domain(d: &SpatialDomain, issues: &mut Vec<Issue>) -> bool {
    match d {
        SpatialDomain::Ball(b) => {
            let c = check_vec(issues, "domain.center", b.center);
            positive(issues, "domain.radius", b.radius) && c
        }
        SpatialDomain::Box(b) => {
            let ok = check_vec(issues, "domain.min", b.min) & check_vec(issues, "domain.max", b.max);
            if ok && !(0..3).all(|i| b.min[i] < b.max[i]) {
                issues.push(Issue::new("domain.max", "must exceed domain.min in every component"));
                return false;
            }
            ok
        }
    }
}

/// Resolves the ball a ball-shaped source lives in, from the scenario
/// domain and/or the source's own `radius`/`center`.
fn source_ball(
    domain: Option<&SpatialDomain>,
    radius: Option<f64>,
    center: Option<Vec3>,
    path: &str,
    issues: &mut Vec<Issue>,
) -> Option<Ball> {
    if let Some(r) = radius {
        if !positive(issues, &format!("{path}.radius"), r) {
            return None;
        }
    }
    if let Some(c) = center {
        if !check_vec(issues, &format!("{path}.center"), c) {
            return None;
        }
    }
    match domain {
        Some(SpatialDomain::Ball(b)) => {
            if radius.is_some_and(|r| r != b.radius) {
                issues.push(Issue::new(format!("{path}.radius"), "must equal domain.radius"));
                return None;
            }
            if center.is_some_and(|c| c != b.center) {
                issues.push(Issue::new(format!("{path}.center"), "must equal domain.center"));
                return None;
            }
            Some(*b)
        }
        Some(SpatialDomain::Box(_)) => {
            issues.push(Issue::new("domain.type", "this source requires a ball domain"));
            None
        }
        None => match radius {
            Some(r) => Ball::new(center.unwrap_or(Vec3::ZERO), r).ok(),
            None => {
                issues.push(Issue::new(format!("{path}.radius"), "required when no domain is given"));
                None
            }
        },
    }
}

fn build_source(
    spec: &SourceSpec,
    domain: Option<&SpatialDomain>,
    path: &str,
    issues: &mut Vec<Issue>,
) -> Option<SourceModel> {
    let frequency = |issues: &mut Vec<Issue>, omega: f64| {
        if omega == 0.0 || !omega.is_finite() {
            issues.push(Issue::new(
                format!("{path}.omega"),
                format!("must be finite and nonzero, got {omega}"),
            ));
            false
        } else {
            true
        }
    };
    let amp = |issues: &mut Vec<Issue>, a: f64| finite(issues, &format!("{path}.amplitude"), a);
    match spec {
        SourceSpec::UniformBallCharge {
            radius,
            center,
            rho0,
            total_charge,
        } => {
            let ball = source_ball(domain, *radius, *center, path, issues)?;
            let rho0 = match (rho0, total_charge) {
                (Some(r), None) => finite(issues, &format!("{path}.rho0"), *r).then_some(*r)?,
                (None, Some(q)) => finite(issues, &format!("{path}.total_charge"), *q).then_some(*q / ball.volume())?,
                _ => {
                    issues.push(Issue::new(
                        format!("{path}.rho0"),
                        "exactly one of rho0 and total_charge is required",
                    ));
                    return None;
                }
            };
            sources::uniform_ball_charge_in(ball, rho0).ok()
        }
        SourceSpec::UniformCharge { rho0 } => {
            let Some(d) = domain else {
                issues.push(Issue::new("domain", "required by uniform_charge"));
                return None;
            };
            finite(issues, &format!("{path}.rho0"), *rho0).then_some(())?;
            sources::uniform_charge(*d, *rho0).ok()
        }
        SourceSpec::AzimuthalBallCurrent {
            radius,
            center,
            amplitude,
        } => {
            let ball = source_ball(domain, *radius, *center, path, issues);
            (amp(issues, *amplitude) && ball.is_some()).then_some(())?;
            sources::azimuthal_ball_current_in(ball?, *amplitude).ok()
        }
        SourceSpec::PolarizationBallCurrent {
            radius,
            center,
            omega,
            amplitude,
        } => {
            let ball = source_ball(domain, *radius, *center, path, issues);
            (frequency(issues, *omega) & amp(issues, *amplitude) && ball.is_some()).then_some(())?;
            sources::polarization_ball_current_in(ball?, *omega, *amplitude).ok()
        }
        SourceSpec::OscillatingBallCharge {
            radius,
            center,
            omega,
            amplitude,
        } => {
            let ball = source_ball(domain, *radius, *center, path, issues);
            (frequency(issues, *omega) & amp(issues, *amplitude) && ball.is_some()).then_some(())?;
            sources::oscillating_ball_charge_in(ball?, *omega, *amplitude).ok()
        }
        SourceSpec::UniformBallCurrent {
            radius,
            center,
            amplitude,
        } => {
            let ball = source_ball(domain, *radius, *center, path, issues);
            (amp(issues, *amplitude) && ball.is_some()).then_some(())?;
            sources::uniform_ball_current_in(ball?, *amplitude).ok()
        }
        SourceSpec::BandLimited { components } => {
            if components.is_empty() {
                issues.push(Issue::new(format!("{path}.components"), "must not be empty"));
                return None;
            }
            let mut parts = Vec::new();
            let mut shared = domain.copied();
            for (i, c) in components.iter().enumerate() {
                let p = format!("{path}.components[{i}]");
                if components[..i].iter().any(|o| o.omega == c.omega) {
                    issues.push(Issue::new(format!("{p}.omega"), "band frequencies must be distinct"));
                }
                if !c.weight.iter().all(|w| w.is_finite()) {
                    issues.push(Issue::new(format!("{p}.weight"), "must be finite"));
                }
                if matches!(c.source, SourceSpec::BandLimited { .. }) {
                    issues.push(Issue::new(format!("{p}.source"), "band components cannot be bands"));
                    continue;
                }
                let sub = format!("{p}.source");
                if let Some(m) = build_source(&c.source, shared.as_ref(), &sub, issues) {
                    match m.kind() {
                        sources::SourceKind::Monochromatic(mono) if mono.omega == c.omega => {
                            shared.get_or_insert(*m.domain());
                            parts.push((c.omega, Complex64::new(c.weight[0], c.weight[1]), m));
                        }
                        sources::SourceKind::Monochromatic(_) => {
                            issues.push(Issue::new(format!("{sub}.omega"), "must equal the component omega"))
                        }
                        _ => issues.push(Issue::new(
                            sub,
                            "band components must oscillate (monochromatic sources)",
                        )),
                    }
                }
            }
            if parts.len() != components.len() {
                return None;
            }
            match sources::band_limited(parts) {
                Ok(m) => Some(m),
                Err(e) => {
                    issues.push(Issue::new(path, e.to_string()));
                    None
                }
            }
        }
    }
}

fn check(file: &ScenarioFile, issues: &mut Vec<Issue>) -> Option<SourceModel> {
    if file.schema != SCHEMA_VERSION {
        issues.push(Issue::new(
            "schema",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema),
        ));
        return None;
    }
    positive(issues, "constants.c", file.constants.c);
    let q = &file.quadrature;
    for (name, value, min) in [
        ("n_radial", q.n_radial, 4),
        ("n_polar", q.n_polar, 4),
        ("n_azimuth", q.n_azimuth, 8),
        ("n_regular", q.n_regular, 8),
    ] {
        if value < min {
            issues.push(Issue::new(
                format!("quadrature.{name}"),
                format!("must be >= {min}, got {value}"),
            ));
        }
    }
    positive(issues, "quadrature.fd_step", q.fd_step);
    let h = &file.hypotheses;
    positive(issues, "hypotheses.continuity", h.continuity);
    positive(issues, "hypotheses.tangency", h.tangency);
    if h.samples == 0 {
        issues.push(Issue::new("hypotheses.samples", "must be >= 1"));
    }
    if h.mesh_resolution < 4 {
        issues.push(Issue::new("hypotheses.mesh_resolution", "must be >= 4"));
    }
    if let Some(g) = &file.grid {
        check_vec(issues, "grid.min", g.min);
        check_vec(issues, "grid.max", g.max);
        if g.counts.contains(&0) {
            issues.push(Issue::new("grid.counts", "every count must be >= 1"));
        }
        if !(0..3).all(|i| g.min[i] <= g.max[i]) {
            issues.push(Issue::new("grid.max", "must not be below grid.min"));
        }
    }
    if file.times.is_empty() {
        issues.push(Issue::new("times", "must not be empty"));
    }
    for (i, t) in file.times.iter().enumerate() {
        finite(issues, &format!("times[{i}]"), *t);
    }
    finite(issues, "verify_time", file.verify_time);
    if let Some(p) = &file.probes {
        if p.is_empty() {
            issues.push(Issue::new("probes", "must not be empty"));
        }
        for (i, v) in p.iter().enumerate() {
            check_vec(issues, &format!("probes[{i}]"), *v);
        }
    }
    let t = &file.tolerances;
    for (i, v) in t.maxwell.iter().enumerate() {
        positive(issues, &format!("tolerances.maxwell[{i}]"), *v);
    }
    for (name, v) in [
        ("gauge", t.gauge),
        ("wave_phi", t.wave_phi),
        ("wave_a", t.wave_a),
        ("continuity", t.continuity),
        ("flux", t.flux),
    ] {
        positive(issues, &format!("tolerances.{name}"), v);
    }
    if file.flux.resolution < 4 {
        issues.push(Issue::new("flux.resolution", "must be >= 4"));
    }
    if let Some(c) = &file.convergence {
        if c.levels < 3 {
            issues.push(Issue::new(
                "convergence.levels",
                format!("must be >= 3, got {}", c.levels),
            ));
        }
        if c.check == CheckName::ScalarPotential && c.reference.is_none() {
            issues.push(Issue::new(
                "convergence.reference",
                "required by the scalar_potential check",
            ));
        }
        if let Some(p) = c.probe {
            check_vec(issues, "convergence.probe", p);
        }
        if !(c.floor >= 0.0 && c.floor.is_finite()) {
            issues.push(Issue::new("convergence.floor", "must be finite and non-negative"));
        }
    }
    for (name, v) in [
        ("potentials", &file.outputs.potentials),
        ("fields", &file.outputs.fields),
        ("verify", &file.outputs.verify),
        ("flux", &file.outputs.flux),
        ("convergence", &file.outputs.convergence),
    ] {
        if v.is_empty() || v.contains('/') || v.contains('\\') {
            issues.push(Issue::new(format!("outputs.{name}"), "must be a plain file name"));
        }
    }

    if let Some(d) = &file.domain {
        if !check_domain(d, issues) {
            return None;
        }
    }
    let model = build_source(&file.source, file.domain.as_ref(), "source", issues)?
        .with_constants(Constants { c: file.constants.c });

    let centre = model.domain().center();
    if let Err(e) = q.validate_for(model.domain()) {
        issues.push(Issue::new("quadrature.fd_step", e.to_string()));
    }
    if let Some(radii) = &file.flux.radii {
        if radii.is_empty() {
            issues.push(Issue::new("flux.radii", "must not be empty"));
        }
        for (i, r) in radii.iter().enumerate() {
            // the sphere must clear the domain by more than fd_step
            if !(r.is_finite() && farthest_distance(model.domain(), centre) + q.fd_step < *r) {
                issues.push(Issue::new(format!("flux.radii[{i}]"), "sphere must enclose the domain"));
            }
        }
    }
    if let Some(c) = &file.convergence {
        if let Some(r) = c.radius {
            if !(r.is_finite() && farthest_distance(model.domain(), centre) + q.fd_step < r) {
                issues.push(Issue::new("convergence.radius", "sphere must enclose the domain"));
            }
        }
    }
    Some(model)
}

/// Largest distance from `centre` to a point of the domain.
fn farthest_distance(domain: &SpatialDomain, centre: Vec3) -> f64 {
    match domain {
        SpatialDomain::Ball(b) => (b.center - centre).norm() + b.radius,
        SpatialDomain::Box(Cuboid { min, max }) => {
            let far = Vec3::new(
                (min.x - centre.x).abs().max((max.x - centre.x).abs()),
                (min.y - centre.y).abs().max((max.y - centre.y).abs()),
                (min.z - centre.z).abs().max((max.z - centre.z).abs()),
            );
            far.norm()
        }
    }
}
