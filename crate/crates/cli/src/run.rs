//! Command execution: hypothesis checks first, then evaluation and output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use retpot_core::fields::fields_at_times;
use retpot_core::potentials::potentials_at_times;
use retpot_core::verify::{self, Check, ConvergenceRecord, ResidualReport, RESIDUAL_NAMES};
use retpot_core::{sources, Complex64, FieldSample, PotentialSample, QuadratureSpec, Vec3};
use serde::Serialize;
use thiserror::Error;

use crate::scenario::{CheckName, Issue, Refine, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Potentials,
    Fields,
    Verify,
    Flux,
    Convergence,
}

/// Failures that stop a command; all map to exit status 1.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid scenario:\n{}", list(.0))]
    Scenario(Vec<Issue>),
    #[error("source rejected: {0}")]
    Hypothesis(retpot_core::Error),
    #[error("{0}")]
    Compute(retpot_core::Error),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn list(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl From<retpot_core::Error> for RunError {
    fn from(e: retpot_core::Error) -> Self {
        RunError::Compute(e)
    }
}

/// What a successful command produced.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
    /// False when a tolerance was exceeded (exit status 2).
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

/// Runs `command`, writing its outputs into `out_dir`.
pub fn run(scenario: &Scenario, command: Command, out_dir: &Path) -> Result<Outcome, RunError> {
    let spec = scenario.file.quadrature;
    sources::validate(&scenario.model, &scenario.file.hypotheses, spec.fd_step).map_err(RunError::Hypothesis)?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    match command {
        Command::Potentials => potentials(scenario, out_dir),
        Command::Fields => fields(scenario, out_dir),
        Command::Verify => verify_cmd(scenario, out_dir),
        Command::Flux => flux(scenario, out_dir),
        Command::Convergence => convergence(scenario, out_dir),
    }
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf, RunError> {
    fs::write(&path, bytes).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> Result<PathBuf, RunError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write(path, text.as_bytes())
}

fn grid_points(scenario: &Scenario, command: &str) -> Result<Vec<Vec3>, RunError> {
    match &scenario.file.grid {
        Some(g) => Ok(g.points()),
        None => Err(RunError::Scenario(vec![Issue {
            path: "grid".into(),
            message: format!("required by the {command} command"),
        }])),
    }
}

/// Evaluates `f` at every grid point in parallel, keeping grid order.
fn evaluate<T: Send>(
    points: &[Vec3],
    f: impl Fn(Vec3) -> retpot_core::Result<Vec<T>> + Sync,
) -> Result<Vec<Vec<T>>, RunError> {
    points
        .par_iter()
        .map(|&p| f(p))
        .collect::<retpot_core::Result<Vec<_>>>()
        .map_err(RunError::from)
}

fn push_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        // 17 significant digits round-trip every f64
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

pub const POTENTIAL_HEADER: &str = "x,y,z,t,phi_re,phi_im,ax_re,ax_im,ay_re,ay_im,az_re,az_im";
pub const FIELD_HEADER: &str = "x,y,z,t,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im,hx_re,hx_im,hy_re,hy_im,hz_re,hz_im";
pub const FIELD_HEADER_REAL: &str = "x,y,z,t,ex,ey,ez,hx,hy,hz";

/// Rows are ordered by time, then grid order (x fastest).
fn rows<T>(per_point: &[Vec<T>], times: usize) -> impl Iterator<Item = &T> {
    (0..times).flat_map(move |ti| per_point.iter().map(move |v| &v[ti]))
}

fn potentials(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, RunError> {
    let points = grid_points(scenario, "potentials")?;
    let times = &scenario.file.times;
    let spec = scenario.file.quadrature;
    let samples: Vec<Vec<PotentialSample>> =
        evaluate(&points, |p| potentials_at_times(&scenario.model, p, times, &spec))?;
    let mut csv = format!("{POTENTIAL_HEADER}\n");
    for s in rows(&samples, times.len()) {
        let a = s.a;
        push_row(
            &mut csv,
            [
                s.point.x, s.point.y, s.point.z, s.time, s.phi.re, s.phi.im, a[0].re, a[0].im, a[1].re, a[1].im,
                a[2].re, a[2].im,
            ],
        );
    }
    let path = write(out_dir.join(&scenario.file.outputs.potentials), csv.as_bytes())?;
    Ok(Outcome {
        summary: format!(
            "{} potential samples written to {}",
            points.len() * times.len(),
            path.display()
        ),
        files: vec![path],
        passed: true,
    })
}

fn fields(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, RunError> {
    let points = grid_points(scenario, "fields")?;
    let times = &scenario.file.times;
    let spec = scenario.file.quadrature;
    let samples: Vec<Vec<FieldSample>> = evaluate(&points, |p| fields_at_times(&scenario.model, p, times, &spec))?;
    let real_only = scenario.file.real_only;
    let mut csv = format!("{}\n", if real_only { FIELD_HEADER_REAL } else { FIELD_HEADER });
    for s in rows(&samples, times.len()) {
        let mut v = vec![s.point.x, s.point.y, s.point.z, s.time];
        for c in s.e.0.iter().chain(s.h.0.iter()) {
            v.push(c.re);
            if !real_only {
                v.push(c.im);
            }
        }
        push_row(&mut csv, v);
    }
    let path = write(out_dir.join(&scenario.file.outputs.fields), csv.as_bytes())?;
    Ok(Outcome {
        summary: format!(
            "{} field samples written to {}",
            points.len() * times.len(),
            path.display()
        ),
        files: vec![path],
        passed: true,
    })
}

#[derive(Serialize)]
struct Wave {
    phi: f64,
    a: f64,
}

#[derive(Serialize)]
struct FluxEntry {
    radius: f64,
    value: f64,
    expected: f64,
    mismatch: f64,
}

#[derive(Serialize)]
struct ResidualSet {
    maxwell: [f64; 4],
    gauge: f64,
    wave: Wave,
    continuity: f64,
}

impl From<&verify::Residuals> for ResidualSet {
    fn from(r: &verify::Residuals) -> Self {
        Self {
            maxwell: r.maxwell,
            gauge: r.gauge,
            wave: Wave {
                phi: r.wave_phi,
                a: r.wave_a,
            },
            continuity: r.continuity,
        }
    }
}

/// The verify report: normalized residuals at the top level, then the
/// absolute values, noise floors and thresholds they were judged against.
#[derive(Serialize)]
struct VerifyJson {
    maxwell: [f64; 4],
    gauge: f64,
    wave: Wave,
    continuity: f64,
    flux: FluxEntry,
    absolute: ResidualSet,
    floor: ResidualSet,
    tolerances: verify::Tolerances,
    time: f64,
    probes: usize,
    pass: bool,
    failures: Vec<String>,
}

fn flux_entry(scenario: &Scenario, radius: f64, spec: &QuadratureSpec) -> Result<FluxEntry, RunError> {
    let mesh = verify::enclosing_sphere(scenario.model.domain(), radius, scenario.file.flux.resolution)?;
    let (value, expected) = verify::gauss_flux_test(&scenario.model, &mesh, spec)?;
    Ok(FluxEntry {
        radius,
        value,
        expected,
        mismatch: verify::flux_mismatch(value, expected),
    })
}

fn table(report: &ResidualReport, tol: &verify::Tolerances, flux: &FluxEntry) -> String {
    let mut out = format!(
        "{:<12} {:>12} {:>12} {:>12}\n",
        "residual", "normalized", "absolute", "tolerance"
    );
    let (n, a, t) = (
        report.normalized.values(),
        report.absolute.values(),
        tol.as_residuals().values(),
    );
    for (i, name) in RESIDUAL_NAMES.iter().enumerate() {
        let mark = if n[i] <= t[i] { "ok" } else { "FAIL" };
        writeln!(
            out,
            "{name:<12} {:>12.3e} {:>12.3e} {:>12.3e}  {mark}",
            n[i], a[i], t[i]
        )
        .unwrap();
    }
    let mark = if flux.mismatch.abs() <= tol.flux { "ok" } else { "FAIL" };
    write!(
        out,
        "{:<12} {:>12.3e} {:>12} {:>12.3e}  {mark}  (flux {:.6} vs {:.6} at r = {})",
        "flux",
        flux.mismatch.abs(),
        "",
        tol.flux,
        flux.value,
        flux.expected,
        flux.radius
    )
    .unwrap();
    out
}

fn verify_cmd(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, RunError> {
    let spec = scenario.file.quadrature;
    let probes = scenario.probes();
    let mut report = verify::maxwell_residuals(&scenario.model, &probes, scenario.file.verify_time, &spec)?;
    let flux = flux_entry(scenario, scenario.flux_radii()[0], &spec)?;
    report.flux_mismatch = Some(flux.mismatch);
    let tol = scenario.file.tolerances;
    let failures = tol.failures(&report);
    let summary = table(&report, &tol, &flux);
    let n = &report.normalized;
    let json = VerifyJson {
        maxwell: n.maxwell,
        gauge: n.gauge,
        wave: Wave {
            phi: n.wave_phi,
            a: n.wave_a,
        },
        continuity: n.continuity,
        flux,
        absolute: (&report.absolute).into(),
        floor: (&report.floor).into(),
        tolerances: tol,
        time: report.time,
        probes: probes.len(),
        pass: failures.is_empty(),
        failures,
    };
    let path = write_json(out_dir.join(&scenario.file.outputs.verify), &json)?;
    Ok(Outcome {
        files: vec![path],
        summary,
        passed: json.pass,
    })
}

fn flux(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, RunError> {
    let spec = scenario.file.quadrature;
    let entries = scenario
        .flux_radii()
        .into_iter()
        .map(|r| flux_entry(scenario, r, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    let tol = scenario.file.tolerances.flux;
    let passed = entries.iter().all(|e| e.mismatch.abs() <= tol);
    let mut summary = String::new();
    for e in &entries {
        writeln!(
            summary,
            "r = {:<8} flux = {:.10} expected = {:.10} mismatch = {:.3e}",
            e.radius, e.value, e.expected, e.mismatch
        )
        .unwrap();
    }
    let path = write_json(out_dir.join(&scenario.file.outputs.flux), &entries)?;
    Ok(Outcome {
        files: vec![path],
        summary: summary.trim_end().to_string(),
        passed,
    })
}

#[derive(Serialize)]
struct ConvergenceJson<'a> {
    check: CheckName,
    probe: Vec3,
    refine: Refine,
    #[serde(flatten)]
    record: &'a ConvergenceRecord,
    floor: f64,
    monotone: bool,
}

/// `count` specs starting at `base`, each refining the previous one.
pub fn refinement_levels(base: QuadratureSpec, count: usize, refine: Refine) -> Vec<QuadratureSpec> {
    let mut out = vec![base];
    while out.len() < count {
        let last = *out.last().unwrap();
        let next = match refine {
            Refine::Both => last.refined(),
            Refine::Nodes => QuadratureSpec {
                fd_step: last.fd_step,
                ..last.refined()
            },
            Refine::FdStep => QuadratureSpec {
                fd_step: 0.5 * last.fd_step,
                ..last
            },
        };
        out.push(next);
    }
    out
}

fn convergence(scenario: &Scenario, out_dir: &Path) -> Result<Outcome, RunError> {
    let Some(conv) = &scenario.file.convergence else {
        return Err(RunError::Scenario(vec![Issue {
            path: "convergence".into(),
            message: "required by the convergence command".into(),
        }]));
    };
    let check = match conv.check.residual() {
        Some(kind) => Check::Residual(kind),
        None if conv.check == CheckName::Flux => Check::Flux {
            radius: conv.radius.unwrap_or_else(|| scenario.flux_radii()[0]),
        },
        None => Check::ScalarPotential {
            reference: Complex64::new(conv.reference.expect("checked at parse time"), 0.0),
        },
    };
    let probe = conv.probe.unwrap_or_else(|| scenario.model.domain().center());
    let levels = refinement_levels(scenario.file.quadrature, conv.levels, conv.refine);
    let record = verify::convergence_study(check, &scenario.model, probe, &levels)?;
    let monotone = record.is_monotone(conv.floor);
    let mut summary = String::new();
    for (i, (s, e)) in record.levels.iter().enumerate() {
        let slope = match i.checked_sub(1).and_then(|j| record.slopes[j]) {
            Some(v) => format!("{v:.2}"),
            None => "-".into(),
        };
        writeln!(
            summary,
            "level {i}: n = ({}, {}, {}, {}) fd_step = {:.3e} error = {e:.3e} slope = {slope}",
            s.n_radial, s.n_polar, s.n_azimuth, s.n_regular, s.fd_step
        )
        .unwrap();
    }
    summary.push_str(if monotone { "monotone" } else { "NOT monotone" });
    let json = ConvergenceJson {
        check: conv.check,
        probe,
        refine: conv.refine,
        record: &record,
        floor: conv.floor,
        monotone,
    };
    let path = write_json(out_dir.join(&scenario.file.outputs.convergence), &json)?;
    Ok(Outcome {
        files: vec![path],
        summary,
        passed: monotone,
    })
}
