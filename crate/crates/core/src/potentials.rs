//! Scalar and vector potentials
//!
//! ```text
//! phi(r0, t) = ∫ rho(r, t - d/c) / d dV
//! A(r0, t)   = (1/c) ∫ j(r, t - d/c) / d dV
//! ```
//!
//! For a harmonic term `exp(-i omega t)` the retardation becomes the factor
//! `exp(i k d)` with `k = omega / c`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::quadrature::QuadratureSpec;
use crate::retarded::{all_moments, harmonic_moments, synthesize};
use crate::sources::{SourceKind, SourceModel};
use crate::vector::{CVec3, Vec3};

/// Potentials at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialSample {
    pub phi: Complex64,
    pub a: CVec3,
    pub point: Vec3,
    pub time: f64,
}

fn static_only(model: &SourceModel, op: &'static str) -> Result<()> {
    match model.kind() {
        SourceKind::Electrostatic { .. } | SourceKind::Magnetostatic { .. } => Ok(()),
        _ => Err(Error::WrongVariant {
            op,
            variant: model.variant_name(),
        }),
    }
}

/// `∫ rho / d dV` for a static model.
pub fn scalar_potential_static(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<Complex64> {
    static_only(model, "scalar_potential_static")?;
    Ok(all_moments(model, p0, spec)[0].2.phi)
}

/// `(1/c) ∫ j / d dV` for a static model; zero for electrostatic ones.
pub fn vector_potential_static(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<CVec3> {
    static_only(model, "vector_potential_static")?;
    if !model.carries_current() {
        return Ok(CVec3::ZERO);
    }
    Ok(all_moments(model, p0, spec)[0].2.a)
}

/// Complex amplitudes `(phi_a, A_a)` of a monochromatic model.
pub fn potentials_mono(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<(Complex64, CVec3)> {
    let SourceKind::Monochromatic(_) = model.kind() else {
        return Err(Error::WrongVariant {
            op: "potentials_mono",
            variant: model.variant_name(),
        });
    };
    let hm = model.harmonics()[0];
    let m = harmonic_moments(model, &hm, p0, spec);
    Ok((m.phi, m.a))
}

/// Time-domain potentials: the weighted sum over harmonic terms of
/// `amplitude * exp(-i omega t)`. Static models ignore `t`.
pub fn potentials_general(model: &SourceModel, p0: Vec3, t: f64, spec: &QuadratureSpec) -> Result<PotentialSample> {
    let m = synthesize(&all_moments(model, p0, spec), t);
    Ok(PotentialSample {
        phi: m.phi,
        a: m.a,
        point: p0,
        time: t,
    })
}

/// [`potentials_general`] at several times from a single quadrature pass.
pub fn potentials_at_times(
    model: &SourceModel,
    p0: Vec3,
    times: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<PotentialSample>> {
    let parts = all_moments(model, p0, spec);
    Ok(times
        .iter()
        .map(|&t| {
            let m = synthesize(&parts, t);
            PotentialSample {
                phi: m.phi,
                a: m.a,
                point: p0,
                time: t,
            }
        })
        .collect())
}

/// Requires `p0` to be farther than `margin` from the boundary on either side.
pub(crate) fn check_clearance(model: &SourceModel, p0: Vec3, margin: f64) -> Result<()> {
    if model.domain().signed_distance(p0).abs() <= margin {
        Err(Error::NearBoundary { point: p0, margin })
    } else {
        Ok(())
    }
}

/// `|div A + (1/c) dphi/dt|` at `(p0, t)`; for monochromatic models this is
/// the amplitude form `|div A_a - i k phi_a|`.
///
/// `div A` uses central differences of potential evaluations with step
/// `spec.fd_step`; time derivatives are exact.
pub fn gauge_residual(model: &SourceModel, p0: Vec3, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let h = spec.fd_step;
    check_clearance(model, p0, 2.0 * h)?;
    let c = model.constants().c;
    let centre = all_moments(model, p0, spec);
    let mut total = Complex64::new(0.0, 0.0);
    let mut div = vec![Complex64::new(0.0, 0.0); centre.len()];
    for i in 0..3 {
        let e = Vec3::axis(i) * h;
        let plus = all_moments(model, p0 + e, spec);
        let minus = all_moments(model, p0 - e, spec);
        for (n, d) in div.iter_mut().enumerate() {
            *d += (plus[n].2.a[i] - minus[n].2.a[i]) / (2.0 * h);
        }
    }
    for (n, &(omega, w, m)) in centre.iter().enumerate() {
        let dphi_dt = Complex64::new(0.0, -omega) * m.phi;
        total += (div[n] + dphi_dt / c) * w * Complex64::from_polar(1.0, -omega * t);
    }
    Ok(total.norm())
}
