//! `calaflow` — validate, check, solve, develop and compare ideal circle
//! pattern metrics on closed triangulated surfaces.
//!
//! Exit codes are stable: 0 success, 1 mathematical failure (invalid
//! structure, unattainable target, non-convergence, solver disagreement),
//! 2 I/O or parse failure (including usage errors), 3 enumeration guard,
//! 4 precondition failure before a solve.

mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use calaflow_core::attainability::{check_target, AttainabilityError, TargetCurvature};
use calaflow_core::complex::{AngleAssignment, MeshDocument, SurfaceComplex, C1_TOL};
use calaflow_core::flow::{run as run_solver, SolveReport, SolverConfig, SolverError, SolverKind};
use calaflow_core::geometry::{BackgroundGeometry, CoordVector, RadiusVector};
use calaflow_core::io::{parse_radii_document, parse_target_values};
use calaflow_core::layout::develop;
use calaflow_core::potential::{psi, PotentialContext};
use calaflow_core::svg::{to_svg, SvgOptions};

use manifest::{to_sorted_pretty, ConfigEcho, RunManifest};

const EXIT_MATH: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    fn math(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MATH,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_GUARD,
            message: message.into(),
        }
    }

    fn precondition(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }
}

fn parse_geometry(s: &str) -> Result<BackgroundGeometry, String> {
    s.parse()
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse()
}

#[derive(Parser)]
#[command(
    name = "calaflow",
    version,
    about = "Ideal circle pattern metrics on closed surfaces via the combinatorial Calabi flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Convergence threshold on max |K - k|. Default 1e-10; the env var
    /// CALAFLOW_RESIDUAL_TOL overrides the default when the flag is absent.
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 0.1)]
    dt_init: f64,
    #[arg(long, default_value_t = 1e-12)]
    dt_min: f64,
    #[arg(long, default_value_t = 10.0)]
    dt_max: f64,
    /// Record every n-th accepted step in the trajectory.
    #[arg(long, default_value_t = 1)]
    stride: u64,
}

impl ConfigArgs {
    fn build(&self) -> Result<SolverConfig, Failure> {
        let residual_tol = match self.residual_tol {
            Some(t) => t,
            None => match std::env::var("CALAFLOW_RESIDUAL_TOL") {
                Ok(v) => v.parse::<f64>().map_err(|_| {
                    Failure::io(format!("CALAFLOW_RESIDUAL_TOL is not a number: {v:?}"))
                })?,
                Err(_) => 1e-10,
            },
        };
        let config = SolverConfig {
            residual_tol,
            max_steps: self.max_steps,
            dt_init: self.dt_init,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            trajectory_stride: self.stride,
        };
        config.validate().map_err(|e| Failure::io(format!("{e}")))?;
        Ok(config)
    }

    fn echo(&self, config: &SolverConfig) -> ConfigEcho {
        ConfigEcho {
            residual_tol: config.residual_tol,
            max_steps: config.max_steps,
            dt_init: config.dt_init,
            dt_min: config.dt_min,
            dt_max: config.dt_max,
            trajectory_stride: config.trajectory_stride,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a mesh document's structure and its fit to a background
    /// geometry; checks (C1) when the document carries theta.
    Validate {
        mesh: PathBuf,
        #[arg(long, value_parser = parse_geometry)]
        geometry: BackgroundGeometry,
    },
    /// Decide whether a target curvature vector is attainable.
    Check {
        mesh: PathBuf,
        /// Target curvature: the literal `zero` or a path to a JSON array.
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_geometry)]
        geometry: BackgroundGeometry,
    },
    /// Solve for the radius vector realizing a target curvature.
    Solve {
        mesh: PathBuf,
        /// Target curvature: the literal `zero` or a path to a JSON array.
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_geometry)]
        geometry: BackgroundGeometry,
        #[arg(long, value_parser = parse_solver, default_value = "calabi")]
        solver: SolverKind,
        /// Comma-separated initial radii; default is seeded log-uniform
        /// in [0.1, 10].
        #[arg(long)]
        r0: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        config: ConfigArgs,
        /// Add a lambda column (Lyapunov gap) to the trajectory CSV.
        #[arg(long)]
        trace_potential: bool,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the trajectory CSV to this path.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Develop a metric into the plane or the Poincaré disk and write SVG.
    Layout {
        mesh: PathBuf,
        /// Radii source: a JSON array, or a solve report with `final_r`.
        #[arg(long)]
        radii: PathBuf,
        #[arg(long, value_parser = parse_geometry)]
        geometry: BackgroundGeometry,
        #[arg(long, default_value_t = 200.0)]
        scale: f64,
        #[arg(long, default_value_t = 1.0)]
        stroke_width: f64,
        #[arg(long)]
        no_circles: bool,
        #[arg(long)]
        no_spokes: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run Calabi, Ricci and Newton on the same input and compare limits.
    Compare {
        mesh: PathBuf,
        /// Target curvature: the literal `zero` or a path to a JSON array.
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_geometry)]
        geometry: BackgroundGeometry,
        #[arg(long)]
        r0: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        config: ConfigArgs,
        /// Skip the attainability gate (the only way to run with N > 25).
        #[arg(long)]
        skip_attainability: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { mesh, geometry } => cmd_validate(&mesh, geometry),
        Command::Check {
            mesh,
            target,
            geometry,
        } => cmd_check(&mesh, &target, geometry),
        Command::Solve {
            mesh,
            target,
            geometry,
            solver,
            r0,
            seed,
            config,
            trace_potential,
            report,
            trajectory,
        } => cmd_solve(
            &mesh,
            &target,
            geometry,
            solver,
            r0.as_deref(),
            seed,
            &config,
            trace_potential,
            report.as_deref(),
            trajectory.as_deref(),
        ),
        Command::Layout {
            mesh,
            radii,
            geometry,
            scale,
            stroke_width,
            no_circles,
            no_spokes,
            output,
        } => cmd_layout(
            &mesh,
            &radii,
            geometry,
            scale,
            stroke_width,
            no_circles,
            no_spokes,
            &output,
        ),
        Command::Compare {
            mesh,
            target,
            geometry,
            r0,
            seed,
            config,
            skip_attainability,
            output,
        } => cmd_compare(
            &mesh,
            &target,
            geometry,
            r0.as_deref(),
            seed,
            &config,
            skip_attainability,
            output.as_deref(),
        ),
    }
}

fn read_mesh(
    path: &Path,
    manifest: &mut RunManifest,
) -> Result<(SurfaceComplex, Option<AngleAssignment>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
    manifest.record_input(&path.display().to_string(), text.as_bytes());
    let doc =
        MeshDocument::parse(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let complex = SurfaceComplex::from_document(&doc)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let angles = doc
        .angles()
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok((complex, angles))
}

fn require_angles(
    angles: Option<AngleAssignment>,
    path: &Path,
) -> Result<AngleAssignment, Failure> {
    angles.ok_or_else(|| {
        Failure::io(format!(
            "{} carries no theta field; this command needs exterior intersection angles",
            path.display()
        ))
    })
}

/// Target spec: the literal `zero` or a path to a JSON array of radians.
fn resolve_target(
    spec: &str,
    n: usize,
    manifest: &mut RunManifest,
) -> Result<(TargetCurvature, bool), Failure> {
    if spec == "zero" {
        return Ok((TargetCurvature::zero(n), true));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Failure::io(format!("reading target {spec}: {e}")))?;
    manifest.record_input(spec, text.as_bytes());
    let values =
        parse_target_values(&text).map_err(|e| Failure::io(format!("target {spec}: {e}")))?;
    if values.len() != n {
        return Err(Failure::io(format!(
            "target {spec} has {} entries for {n} vertices",
            values.len()
        )));
    }
    Ok((TargetCurvature::new(values), false))
}

fn parse_r0(text: &str, n: usize) -> Result<RadiusVector, Failure> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values = values.map_err(|e| Failure::io(format!("--r0: {e}")))?;
    if values.len() != n {
        return Err(Failure::io(format!(
            "--r0 has {} entries for {n} vertices",
            values.len()
        )));
    }
    RadiusVector::new(values).map_err(|e| Failure::io(format!("--r0: {e}")))
}

fn seeded_r0(seed: u64, n: usize) -> RadiusVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-1.0..1.0)))
        .collect();
    RadiusVector::new(values).expect("log-uniform radii are positive")
}

fn map_solver_error(e: SolverError) -> Failure {
    match e {
        SolverError::C1Violated { .. } | SolverError::Unattainable { .. } => {
            Failure::precondition(e.to_string())
        }
        SolverError::StepUnderflow { .. }
        | SolverError::MaxSteps { .. }
        | SolverError::NoProgress { .. }
        | SolverError::SingularSystem => Failure::math(e.to_string()),
        other => Failure::io(other.to_string()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(format!("writing {}: {e}", path.display())))
}

fn cmd_validate(mesh: &Path, geometry: BackgroundGeometry) -> Result<(), Failure> {
    let mut manifest = RunManifest::new();
    manifest.geometry = Some(geometry.to_string());
    let (complex, angles) = read_mesh(mesh, &mut manifest)?;
    let validation = complex.validate(geometry);
    let mut ok = validation.ok;

    let c1 = match &angles {
        None => json!({ "checked": false }),
        Some(a) => {
            let deviations = complex
                .check_c1(a)
                .map_err(|e| Failure::io(e.to_string()))?;
            let violations: Vec<String> = deviations
                .iter()
                .enumerate()
                .filter(|(_, d)| d.abs() > C1_TOL)
                .map(|(f, d)| format!("face {f}: angle sum deviates from pi by {d:e}"))
                .collect();
            let max_dev = deviations.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            ok &= violations.is_empty();
            json!({
                "checked": true,
                "max_abs_deviation": max_dev,
                "violations": violations,
            })
        }
    };

    let out = json!({
        "manifest": manifest,
        "validation": validation,
        "c1": c1,
        "ok": ok,
    });
    print!("{}", to_sorted_pretty(&out));
    if ok {
        Ok(())
    } else {
        Err(Failure::math("validation failed"))
    }
}

fn cmd_check(mesh: &Path, target: &str, geometry: BackgroundGeometry) -> Result<(), Failure> {
    let mut manifest = RunManifest::new();
    manifest.geometry = Some(geometry.to_string());
    let (complex, angles) = read_mesh(mesh, &mut manifest)?;
    let angles = require_angles(angles, mesh)?;
    let (target, _) = resolve_target(target, complex.num_vertices(), &mut manifest)?;

    let report = check_target(&complex, &angles, &target, geometry).map_err(|e| match e {
        AttainabilityError::TooManyVertices { .. } => Failure::guard(e.to_string()),
        other => Failure::io(other.to_string()),
    })?;

    let out = json!({ "manifest": manifest, "report": report });
    print!("{}", to_sorted_pretty(&out));
    if report.attainable {
        Ok(())
    } else {
        Err(Failure::math("target curvature is not attainable"))
    }
}

/// Preconditions shared by solve and compare: structural validity, (C1),
/// the Gauss-Bonnet sanity of a Euclidean `zero` target, attainability.
fn gate_preconditions(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    geometry: BackgroundGeometry,
    target_is_zero: bool,
    skip_attainability: bool,
) -> Result<(), Failure> {
    let validation = complex.validate(geometry);
    if !validation.ok {
        return Err(Failure::precondition(format!(
            "mesh fails validation: {}",
            validation.violations.join("; ")
        )));
    }
    let deviations = complex
        .check_c1(angles)
        .map_err(|e| Failure::io(e.to_string()))?;
    if let Some((f, d)) = deviations
        .iter()
        .enumerate()
        .find(|(_, d)| d.abs() > C1_TOL)
    {
        return Err(Failure::precondition(format!(
            "(C1) fails at face {f}: angle sum deviates from pi by {d:e}"
        )));
    }
    if target_is_zero && geometry == BackgroundGeometry::Euclidean {
        let chi = complex.euler_characteristic();
        if chi != 0 {
            return Err(Failure::precondition(format!(
                "Euclidean zero target needs total curvature 2πχ = 0, but χ = {chi}"
            )));
        }
    }
    if skip_attainability {
        return Ok(());
    }
    match check_target(complex, angles, target, geometry) {
        Ok(report) => {
            if !report.attainable {
                return Err(Failure::precondition(format!(
                    "target curvature is not attainable: {}",
                    to_sorted_pretty(&report).trim()
                )));
            }
            Ok(())
        }
        Err(AttainabilityError::TooManyVertices { num_vertices, max }) => {
            Err(Failure::guard(format!(
                "{num_vertices} vertices exceed the enumeration guard of {max}; \
                 pass --skip-attainability to run unguarded"
            )))
        }
        Err(e) => Err(Failure::io(e.to_string())),
    }
}

fn solve_report_value(
    manifest: &RunManifest,
    kind: SolverKind,
    report: &SolveReport,
) -> serde_json::Value {
    json!({
        "manifest": manifest,
        "solver": kind,
        "geometry": report.geometry,
        "converged": report.converged,
        "final_r": report.final_r,
        "final_u": report.final_u,
        "final_residual": report.final_residual,
        "steps": report.steps,
        "accepted_steps": report.accepted_steps,
        "rejected_steps": report.rejected_steps,
        "trajectory_samples": report.trajectory.len(),
        "sum_u_initial": report.trajectory.first().map(|s| s.sum_u),
        "sum_u_final": report.trajectory.last().map(|s| s.sum_u),
        "energy_final": report.trajectory.last().map(|s| s.energy),
    })
}

/// Lyapunov gap per sample, evaluated after the run against the converged
/// point: Λ(u) = Ψ(u) − Ψ(u*), with Ψ based at the first sample.
fn trajectory_lambdas(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    report: &SolveReport,
) -> Result<Vec<f64>, Failure> {
    let geometry = report.geometry;
    let base = CoordVector::new(report.trajectory[0].u.clone(), geometry)
        .map_err(|e| Failure::math(e.to_string()))?;
    let ctx =
        PotentialContext::new(base, target.clone()).map_err(|e| Failure::math(e.to_string()))?;
    let u_star = CoordVector::new(report.final_u.clone(), geometry)
        .map_err(|e| Failure::math(e.to_string()))?;
    let psi_star = psi(&ctx, complex, angles, &u_star).map_err(|e| Failure::math(e.to_string()))?;
    report
        .trajectory
        .iter()
        .map(|s| {
            let u = CoordVector::new(s.u.clone(), geometry)
                .map_err(|e| Failure::math(e.to_string()))?;
            Ok(
                psi(&ctx, complex, angles, &u).map_err(|e| Failure::math(e.to_string()))?
                    - psi_star,
            )
        })
        .collect()
}

fn trajectory_csv(manifest: &RunManifest, report: &SolveReport, lambdas: Option<&[f64]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("# manifest: {}\n", manifest.compact_json()));
    out.push_str("t,residual,energy,sum_u");
    if lambdas.is_some() {
        out.push_str(",lambda");
    }
    out.push('\n');
    for (i, s) in report.trajectory.iter().enumerate() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t, s.residual, s.energy, s.sum_u
        ));
        if let Some(l) = lambdas {
            out.push_str(&format!(",{:.16e}", l[i]));
        }
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    mesh: &Path,
    target_spec: &str,
    geometry: BackgroundGeometry,
    solver: SolverKind,
    r0: Option<&str>,
    seed: u64,
    config_args: &ConfigArgs,
    trace_potential: bool,
    report_path: Option<&Path>,
    trajectory_path: Option<&Path>,
) -> Result<(), Failure> {
    let mut manifest = RunManifest::new();
    manifest.geometry = Some(geometry.to_string());
    manifest.solver = Some(solver.to_string());
    let config = config_args.build()?;
    manifest.config = Some(config_args.echo(&config));

    let (complex, angles) = read_mesh(mesh, &mut manifest)?;
    let angles = require_angles(angles, mesh)?;
    let n = complex.num_vertices();
    let (target, target_is_zero) = resolve_target(target_spec, n, &mut manifest)?;
    gate_preconditions(&complex, &angles, &target, geometry, target_is_zero, false)?;

    let r0 = match r0 {
        Some(text) => parse_r0(text, n)?,
        None => {
            manifest.seed = Some(seed);
            seeded_r0(seed, n)
        }
    };

    match run_solver(solver, &complex, &angles, &target, &r0, geometry, &config) {
        Ok(report) => {
            let value = solve_report_value(&manifest, solver, &report);
            let pretty = to_sorted_pretty(&value);
            print!("{pretty}");
            if let Some(path) = report_path {
                write_text(path, &pretty)?;
            }
            if let Some(path) = trajectory_path {
                let lambdas = if trace_potential {
                    Some(trajectory_lambdas(&complex, &angles, &target, &report)?)
                } else {
                    None
                };
                write_text(
                    path,
                    &trajectory_csv(&manifest, &report, lambdas.as_deref()),
                )?;
            }
            Ok(())
        }
        Err(e) => {
            let value = json!({ "manifest": manifest, "converged": false, "error": e.to_string() });
            let pretty = to_sorted_pretty(&value);
            print!("{pretty}");
            if let Some(path) = report_path {
                write_text(path, &pretty)?;
            }
            Err(map_solver_error(e))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_layout(
    mesh: &Path,
    radii_path: &Path,
    geometry: BackgroundGeometry,
    scale: f64,
    stroke_width: f64,
    no_circles: bool,
    no_spokes: bool,
    output: &Path,
) -> Result<(), Failure> {
    let mut manifest = RunManifest::new();
    manifest.geometry = Some(geometry.to_string());
    let (complex, angles) = read_mesh(mesh, &mut manifest)?;
    let angles = require_angles(angles, mesh)?;

    let radii_text = std::fs::read_to_string(radii_path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", radii_path.display())))?;
    manifest.record_input(&radii_path.display().to_string(), radii_text.as_bytes());
    let values = parse_radii_document(&radii_text)
        .map_err(|e| Failure::io(format!("{}: {e}", radii_path.display())))?;
    if values.len() != complex.num_vertices() {
        return Err(Failure::io(format!(
            "{} carries {} radii for {} vertices",
            radii_path.display(),
            values.len(),
            complex.num_vertices()
        )));
    }
    let r = RadiusVector::new(values)
        .map_err(|e| Failure::io(format!("{}: {e}", radii_path.display())))?;

    let layout =
        develop(&complex, &angles, &r, geometry).map_err(|e| Failure::math(e.to_string()))?;
    let options = SvgOptions {
        scale,
        stroke_width,
        draw_circles: !no_circles,
        draw_interstices: !no_spokes,
        ..SvgOptions::default()
    };
    let mut svg = to_svg(&layout, &options);
    // Embed the manifest right after the XML prolog.
    if let Some(pos) = svg.find('\n') {
        svg.insert_str(
            pos + 1,
            &format!("<!-- manifest: {} -->\n", manifest.compact_json()),
        );
    }
    write_text(output, &svg)?;
    println!("wrote {}", output.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    mesh: &Path,
    target_spec: &str,
    geometry: BackgroundGeometry,
    r0: Option<&str>,
    seed: u64,
    config_args: &ConfigArgs,
    skip_attainability: bool,
    output: Option<&Path>,
) -> Result<(), Failure> {
    const AGREEMENT_TOL: f64 = 1e-8;

    let mut manifest = RunManifest::new();
    manifest.geometry = Some(geometry.to_string());
    let config = config_args.build()?;
    manifest.config = Some(config_args.echo(&config));

    let (complex, angles) = read_mesh(mesh, &mut manifest)?;
    let angles = require_angles(angles, mesh)?;
    let n = complex.num_vertices();
    let (target, target_is_zero) = resolve_target(target_spec, n, &mut manifest)?;
    gate_preconditions(
        &complex,
        &angles,
        &target,
        geometry,
        target_is_zero,
        skip_attainability,
    )?;

    let r0 = match r0 {
        Some(text) => parse_r0(text, n)?,
        None => {
            manifest.seed = Some(seed);
            seeded_r0(seed, n)
        }
    };

    let kinds = [SolverKind::Calabi, SolverKind::Ricci, SolverKind::Newton];
    let mut results = BTreeMap::new();
    let mut reports: BTreeMap<String, SolveReport> = BTreeMap::new();
    let mut all_converged = true;
    for kind in kinds {
        match run_solver(kind, &complex, &angles, &target, &r0, geometry, &config) {
            Ok(report) => {
                results.insert(
                    kind.to_string(),
                    json!({
                        "converged": true,
                        "steps": report.steps,
                        "final_residual": report.final_residual,
                        "final_r": report.final_r,
                    }),
                );
                reports.insert(kind.to_string(), report);
            }
            Err(e) => {
                all_converged = false;
                results.insert(
                    kind.to_string(),
                    json!({ "converged": false, "error": e.to_string() }),
                );
            }
        }
    }

    // Pairwise limit distances; Euclidean limits are rescaled to a common Σu.
    let normalized = |r: &SolveReport| -> Vec<f64> {
        match geometry {
            BackgroundGeometry::Hyperbolic => r.final_r.clone(),
            BackgroundGeometry::Euclidean => {
                let mean = r.final_u.iter().sum::<f64>() / r.final_u.len() as f64;
                r.final_u.iter().map(|u| (u - mean).exp()).collect()
            }
        }
    };
    let mut pairwise = BTreeMap::new();
    let mut agree = all_converged;
    let names: Vec<&String> = reports.keys().collect();
    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let a = normalized(&reports[names[i]]);
            let b = normalized(&reports[names[j]]);
            let dist = a
                .iter()
                .zip(&b)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if dist > AGREEMENT_TOL {
                agree = false;
            }
            pairwise.insert(format!("{}-{}", names[i], names[j]), dist);
        }
    }

    let out = json!({
        "manifest": manifest,
        "geometry": geometry,
        "tolerance": AGREEMENT_TOL,
        "results": results,
        "pairwise": pairwise,
        "agree": agree,
    });
    let pretty = to_sorted_pretty(&out);
    print!("{pretty}");
    if let Some(path) = output {
        write_text(path, &pretty)?;
    }
    if agree && all_converged {
        Ok(())
    } else {
        Err(Failure::math(
            "solvers disagree or failed to converge".to_string(),
        ))
    }
}
