//! One quadrature pass per harmonic term yields the potentials and their
//! first derivatives together.
//!
//! With `g = exp(ikd)/d` and `grad0 g = (ikd - 1) exp(ikd) (r0 - r) / d^3`,
//! every integrand is `O(1/d^2)`, so all four share the power-2 kernel and
//! the numerator `d^2 * integrand`.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::quadrature::{integrate_kernel, KernelPoint, QuadratureSpec};
use crate::sources::{Harmonic, SourceModel};
use crate::vector::{CVec3, Vec3};

/// Potentials and their first derivatives at one observation point, for a
/// single harmonic term (amplitudes, no weight or phase).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Moments {
    pub phi: Complex64,
    pub a: CVec3,
    pub grad_phi: CVec3,
    pub curl_a: CVec3,
}

impl Add for Moments {
    type Output = Moments;
    fn add(self, o: Moments) -> Moments {
        Moments {
            phi: self.phi + o.phi,
            a: self.a + o.a,
            grad_phi: self.grad_phi + o.grad_phi,
            curl_a: self.curl_a + o.curl_a,
        }
    }
}

impl Mul<f64> for Moments {
    type Output = Moments;
    fn mul(self, s: f64) -> Moments {
        Moments {
            phi: self.phi * s,
            a: self.a * s,
            grad_phi: self.grad_phi * s,
            curl_a: self.curl_a * s,
        }
    }
}

impl Mul<Complex64> for Moments {
    type Output = Moments;
    fn mul(self, s: Complex64) -> Moments {
        Moments {
            phi: self.phi * s,
            a: self.a * s,
            grad_phi: self.grad_phi * s,
            curl_a: self.curl_a * s,
        }
    }
}

impl Moments {
    /// `E = -grad phi + i k A`.
    pub fn e(&self, k: f64) -> CVec3 {
        -self.grad_phi + self.a * Complex64::new(0.0, k)
    }

    /// `H = rot A`.
    pub fn h(&self) -> CVec3 {
        self.curl_a
    }
}

/// Moments of one harmonic term at `p0`.
pub(crate) fn harmonic_moments(model: &SourceModel, hm: &Harmonic<'_>, p0: Vec3, spec: &QuadratureSpec) -> Moments {
    let c = model.constants().c;
    let k = model.constants().wavenumber(hm.omega);
    let inv_c = 1.0 / c;
    let f = |r: Vec3, kp: KernelPoint| {
        let d = kp.d;
        let e = Complex64::from_polar(1.0, k * d);
        let g = Complex64::new(-1.0, k * d) * e;
        let mut m = Moments::default();
        if let Some(rho) = hm.rho {
            let q = rho.value(r);
            m.phi = q * e * d;
            m.grad_phi = CVec3::scaled(kp.direction, q * g);
        }
        if let Some(j) = hm.j {
            let jv = j.value(r);
            m.a = jv * (e * (d * inv_c));
            m.curl_a = CVec3::cross_from_real(kp.direction, &jv) * (g * inv_c);
        }
        m
    };
    integrate_kernel(model.domain(), p0, f, 2, spec).expect("power-2 kernel is supported")
}

/// Moments of every harmonic term, paired with `(omega, weight)`.
pub(crate) fn all_moments(model: &SourceModel, p0: Vec3, spec: &QuadratureSpec) -> Vec<(f64, Complex64, Moments)> {
    model
        .harmonics()
        .iter()
        .map(|hm| (hm.omega, hm.weight, harmonic_moments(model, hm, p0, spec)))
        .collect()
}

/// Time-domain moments: `Σ weight exp(-i omega t) moments`.
pub(crate) fn synthesize(parts: &[(f64, Complex64, Moments)], t: f64) -> Moments {
    parts.iter().fold(Moments::default(), |acc, &(omega, w, m)| {
        acc + m * (w * Complex64::from_polar(1.0, -omega * t))
    })
}
