//! Fixtures shared by the benchmarks in `benches/`.

use retpot_core::sources;
use retpot_core::{Complex64, SourceModel};

pub fn electrostatic() -> SourceModel {
    sources::uniform_ball_charge_with_total(1.0, 1.0).expect("valid ball")
}

pub fn magnetostatic() -> SourceModel {
    sources::azimuthal_ball_current(1.0, 1.0).expect("valid ball")
}

pub fn monochromatic() -> SourceModel {
    sources::polarization_ball_current(1.0, 1.0, 1.0).expect("valid ball")
}

/// Two monochromatic components at omega 1 and 2.
pub fn band() -> SourceModel {
    sources::band_limited(vec![
        (1.0, Complex64::new(1.0, 0.0), monochromatic()),
        (
            2.0,
            Complex64::new(0.5, -0.25),
            sources::polarization_ball_current(1.0, 2.0, 0.5).expect("valid ball"),
        ),
    ])
    .expect("matching components")
}

/// Named fixtures, in benchmark order.
pub fn models() -> Vec<(&'static str, SourceModel)> {
    vec![
        ("electrostatic", electrostatic()),
        ("magnetostatic", magnetostatic()),
        ("monochromatic", monochromatic()),
        ("band", band()),
    ]
}
