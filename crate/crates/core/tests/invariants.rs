use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use retpot_core::fields::{efield_static, fields_general, fields_mono, hfield_static};
use retpot_core::geometry::Ball;
use retpot_core::potentials::{potentials_general, potentials_mono, scalar_potential_static};
use retpot_core::sources::{
    azimuthal_ball_current, band_limited, polarization_ball_current, uniform_ball_charge,
    uniform_ball_charge_with_total, ChargeDensity, FnCharge, ParabolicCharge, SourceKind,
};
use retpot_core::{Complex64, QuadratureSpec, Region, SourceModel, SpatialDomain, Vec3};

fn coarse() -> QuadratureSpec {
    QuadratureSpec {
        n_radial: 16,
        n_polar: 12,
        n_azimuth: 24,
        n_regular: 12,
        fd_step: 1e-3,
    }
}

fn point() -> impl Strategy<Value = Vec3> {
    (-2.5f64..2.5, -2.5f64..2.5, -2.5f64..2.5).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn electrostatic(rho: Arc<dyn ChargeDensity>) -> SourceModel {
    SourceModel::new(
        SpatialDomain::ball(Vec3::ZERO, 1.0).unwrap(),
        SourceKind::Electrostatic { rho },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn superposition_of_charges(p in point(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let ball = Ball::new(Vec3::ZERO, 1.0).unwrap();
        let r1: Arc<dyn ChargeDensity> = Arc::new(ParabolicCharge { ball, amplitude: a });
        let r2: Arc<dyn ChargeDensity> = Arc::new(FnCharge(move |q: Vec3| Complex64::new(b * q.x, 0.0)));
        let (s1, s2) = (r1.clone(), r2.clone());
        let sum = electrostatic(Arc::new(FnCharge(move |q| s1.value(q) + s2.value(q))));
        let phi = |m: &SourceModel| scalar_potential_static(m, p, &coarse()).unwrap();
        let lhs = phi(&sum);
        let rhs = phi(&electrostatic(r1)) + phi(&electrostatic(r2));
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn static_sample_invariants(p in point(), t in -5.0f64..5.0) {
        let e = uniform_ball_charge(1.0, 0.4).unwrap();
        let s = potentials_general(&e, p, t, &coarse()).unwrap();
        prop_assert_eq!(s.phi.im, 0.0);
        prop_assert!(s.a.0.iter().all(|z| z.norm() == 0.0));
        let f = fields_general(&e, p, t, &coarse()).unwrap();
        prop_assert!(f.h.0.iter().all(|z| z.norm() == 0.0));

        let m = azimuthal_ball_current(1.0, 2.0).unwrap();
        let s = potentials_general(&m, p, t, &coarse()).unwrap();
        prop_assert!(s.a.0.iter().all(|z| z.im == 0.0));
        let f = fields_general(&m, p, t, &coarse()).unwrap();
        prop_assert!(f.h.0.iter().all(|z| z.im == 0.0));
        prop_assert!(f.e.0.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_component_band_is_amplitude_times_phase(p in point(), t in -10.0f64..10.0) {
        let mono = polarization_ball_current(1.0, 1.7, 1.0).unwrap();
        let w = Complex64::new(0.6, -0.8);
        let band = band_limited(vec![(1.7, w, mono.clone())]).unwrap();
        let ph = w * Complex64::from_polar(1.0, -1.7 * t);
        let (phi, a) = potentials_mono(&mono, p, &coarse()).unwrap();
        let s = potentials_general(&band, p, t, &coarse()).unwrap();
        prop_assert!((s.phi - phi * ph).norm() <= 4.0 * f64::EPSILON * phi.norm());
        prop_assert!((s.a - a * ph).norm() <= 4.0 * f64::EPSILON * a.norm());
        let (e, h) = fields_mono(&mono, p, &coarse()).unwrap();
        let f = fields_general(&band, p, t, &coarse()).unwrap();
        prop_assert!((f.e - e * ph).norm() <= 4.0 * f64::EPSILON * e.norm());
        prop_assert!((f.h - h * ph).norm() <= 4.0 * f64::EPSILON * h.norm());
    }

    #[test]
    fn potential_is_lipschitz_across_boundary(
        theta in 0.0f64..PI, beta in 0.0f64..(2.0 * PI), q in 0.1f64..3.0,
    ) {
        // |grad phi| <= Q/R^2 for a uniform ball, so C = 3 is generous
        let m = uniform_ball_charge_with_total(1.0, q).unwrap();
        let dir = Vec3::new(theta.sin() * beta.cos(), theta.sin() * beta.sin(), theta.cos());
        for delta in [1e-2, 1e-3] {
            let inner = scalar_potential_static(&m, dir * (1.0 - delta), &coarse()).unwrap();
            let outer = scalar_potential_static(&m, dir * (1.0 + delta), &coarse()).unwrap();
            prop_assert!((inner - outer).norm() < 3.0 * q * delta);
        }
    }
}

/// `-grad phi` by central differences points away from a positive charge,
/// and its flux through an enclosing sphere is `+4 pi Q`.
#[test]
fn sign_convention_from_potential_gradient() {
    let m = uniform_ball_charge_with_total(1.0, 1.0).unwrap();
    let spec = coarse();
    let h = spec.fd_step;
    let mesh = SpatialDomain::ball(Vec3::ZERO, 1.5).unwrap().boundary_mesh(8);
    let mut flux = 0.0;
    for s in &mesh.samples {
        let phi = |q: Vec3| scalar_potential_static(&m, q, &spec).unwrap().re;
        let e = Vec3::new(
            -(phi(s.point + Vec3::X * h) - phi(s.point - Vec3::X * h)) / (2.0 * h),
            -(phi(s.point + Vec3::Y * h) - phi(s.point - Vec3::Y * h)) / (2.0 * h),
            -(phi(s.point + Vec3::Z * h) - phi(s.point - Vec3::Z * h)) / (2.0 * h),
        );
        assert!(e.dot(s.normal) > 0.0);
        flux += e.dot(s.normal) * s.weight;
    }
    assert!(((flux - 4.0 * PI) / (4.0 * PI)).abs() < 1e-3, "{flux}");
}

#[test]
fn fields_do_not_depend_on_domain_placement() {
    // translating source and observer together leaves the fields unchanged
    let shift = Vec3::new(0.3, -1.2, 2.0);
    let a = azimuthal_ball_current(1.0, 1.0).unwrap();
    let b = retpot_core::sources::azimuthal_ball_current_in(Ball::new(shift, 1.0).unwrap(), 1.0).unwrap();
    for p in [Vec3::new(0.2, 0.3, -0.1), Vec3::new(1.5, 0.0, 0.5)] {
        let ha = hfield_static(&a, p, &coarse()).unwrap();
        let hb = hfield_static(&b, p + shift, &coarse()).unwrap();
        assert!((ha - hb).norm() < 1e-10 * (1.0 + ha.norm()));
    }
    let e = uniform_ball_charge(1.0, 1.0).unwrap();
    let f = efield_static(&e, Vec3::new(0.0, 0.0, 4.0), &coarse()).unwrap();
    assert!(f.z().re > 0.0 && b.domain().contains(shift));
}
