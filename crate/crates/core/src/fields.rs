//! Electric and magnetic fields, `E = -grad phi + i k A` and `H = rot A`,
//! with the first derivatives taken under the integral sign:
//!
//! ```text
//! grad0 [exp(ikd)/d] = (ikd - 1) exp(ikd) (r0 - r) / d^3
//! ```
//!
//! In the static limit these reduce to the Coulomb and Biot–Savart integrals.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::retarded::{all_moments, harmonic_moments, Moments};
use crate::sources::{SourceKind, SourceModel};
use crate::vector::{CVec3, Vec3};

/// Fields at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldSample {
    pub e: CVec3,
    pub h: CVec3,
    pub point: Vec3,
    pub time: f64,
}

fn static_moments(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec, op: &'static str) -> Result<Moments> {
    match model.kind() {
        SourceKind::Electrostatic { .. } | SourceKind::Magnetostatic { .. } => Ok(all_moments(model, p0, spec)[0].2),
        _ => Err(Error::WrongVariant {
            op,
            variant: model.variant_name(),
        }),
    }
}

/// `∫ rho (r0 - r) / |r0 - r|^3 dV`.
pub fn efield_static(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<CVec3> {
    static_moments(model, p0, spec, "efield_static").map(|m| m.e(0.0))
}

/// `(1/c) ∫ j × (r0 - r) / |r0 - r|^3 dV`.
pub fn hfield_static(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<CVec3> {
    if !model.carries_current() {
        static_moments(model, p0, spec, "hfield_static")?;
        return Ok(CVec3::ZERO);
    }
    static_moments(model, p0, spec, "hfield_static").map(|m| m.h())
}

/// Complex amplitudes `(E_a, H_a)` of a monochromatic model.
pub fn fields_mono(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Result<(CVec3, CVec3)> {
    let SourceKind::Monochromatic(_) = model.kind() else {
        return Err(Error::WrongVariant {
            op: "fields_mono",
            variant: model.variant_name(),
        });
    };
    let hm = model.harmonics()[0];
    let m = harmonic_moments(model, &hm, p0, spec);
    let k = model.constants().wavenumber(hm.omega);
    Ok((m.e(k), m.h()))
}

/// Per-harmonic `(omega, weight, E, H)` amplitudes.
pub(crate) fn field_parts(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Vec<(f64, Complex64, CVec3, CVec3)> {
    let consts = model.constants();
    all_moments(model, p0, spec)
        .into_iter()
        .map(|(omega, w, m)| (omega, w, m.e(consts.wavenumber(omega)), m.h()))
        .collect()
}

/// Time-domain fields: the weighted sum of harmonic amplitudes times
/// `exp(-i omega t)`. Static models ignore `t`.
pub fn fields_general(model: &SourceModel, p0: Vec3, t: f64, spec: &QuadratureSpec) -> Result<FieldSample> {
    Ok(synthesize(&field_parts(model, p0, spec), p0, t))
}

/// [`fields_general`] at several times from a single quadrature pass.
pub fn fields_at_times(
    model: &SourceModel,
    p0: Vec3,
    times: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<FieldSample>> {
    let parts = field_parts(model, p0, spec);
    Ok(times.iter().map(|&t| synthesize(&parts, p0, t)).collect())
}

fn synthesize(parts: &[(f64, Complex64, CVec3, CVec3)], p0: Vec3, t: f64) -> FieldSample {
    let (e, h) = parts
        .iter()
        .fold((CVec3::ZERO, CVec3::ZERO), |(e, h), &(omega, w, ea, ha)| {
            let ph = w * Complex64::from_polar(1.0, -omega * t);
            (e + ea * ph, h + ha * ph)
        });
    FieldSample {
        e,
        h,
        point: p0,
        time: t,
    }
}
