//! Flow solvers for prescribed curvature.
//!
//! The production path integrates the combinatorial Calabi flow
//! `du/dt = −L(u)·(K(u) − k)` with an embedded Bogacki–Shampine 3(2) pair.
//! A step is accepted only if the local error estimate passes, the energy
//! `C(u) = Σ(Kᵢ−kᵢ)²` does not increase, and (hyperbolically) the state stays
//! in `u < 0`; otherwise the step size is cut. The Ricci flow
//! `du/dt = −(K − k)` and a damped Newton iteration on `K(u) = k` share the
//! same report format and serve as cross-checks for the Calabi limit.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::attainability::{
    check_target, AttainabilityError, AttainabilityReport, TargetCurvature, MAX_ENUM_VERTICES,
};
use crate::complex::{AngleAssignment, ComplexError, SurfaceComplex, C1_TOL};
use crate::geometry::{
    curvatures, from_coords, jacobian, to_coords, BackgroundGeometry, CoordVector, CurvatureVector,
    GeometryError, RadiusVector,
};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Attainability(#[from] AttainabilityError),
    #[error("angle assignment violates (C1) at face {face}: deviation {deviation:e}")]
    C1Violated { face: usize, deviation: f64 },
    #[error("target curvature is not attainable ({report:?})")]
    Unattainable { report: AttainabilityReport },
    #[error("step size underflow at t = {t} (dt = {dt:e}, residual = {residual:e})")]
    StepUnderflow { t: f64, dt: f64, residual: f64 },
    #[error("solver exhausted {steps} steps with residual {residual:e}")]
    MaxSteps { steps: u64, residual: f64 },
    #[error("restricted Newton system is singular")]
    SingularSystem,
    #[error(
        "Newton backtracking made no progress at iteration {iteration} (residual {residual:e})"
    )]
    NoProgress { iteration: u64, residual: f64 },
}

/// Step-size and termination parameters shared by all solvers.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Convergence threshold on `max |Kᵢ − kᵢ|`.
    pub residual_tol: f64,
    pub max_steps: u64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Record every n-th accepted step in the trajectory (plus first and last).
    pub trajectory_stride: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_steps: 1_000_000,
            dt_init: 0.1,
            dt_min: 1e-12,
            dt_max: 10.0,
            trajectory_stride: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(SolverError::Config(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(SolverError::Config(format!(
                "need 0 < dt_min <= dt_init <= dt_max, got {} / {} / {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        if self.trajectory_stride == 0 {
            return Err(SolverError::Config("trajectory_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Which solver to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Calabi,
    Ricci,
    Newton,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverKind::Calabi => write!(f, "calabi"),
            SolverKind::Ricci => write!(f, "ricci"),
            SolverKind::Newton => write!(f, "newton"),
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "calabi" => Ok(SolverKind::Calabi),
            "ricci" => Ok(SolverKind::Ricci),
            "newton" => Ok(SolverKind::Newton),
            other => Err(format!(
                "unknown solver {other:?}; expected calabi, ricci or newton"
            )),
        }
    }
}

/// One recorded point of a solve. For the flow solvers `t` is flow time;
/// for Newton it is the iteration index.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub residual: f64,
    pub energy: f64,
    pub sum_u: f64,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub converged: bool,
    pub geometry: BackgroundGeometry,
    pub final_r: Vec<f64>,
    pub final_u: Vec<f64>,
    pub final_residual: f64,
    pub steps: u64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub trajectory: Vec<TrajectorySample>,
}

fn max_residual(k: &CurvatureVector, target: &TargetCurvature) -> f64 {
    k.values()
        .iter()
        .zip(target.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// The energy `C(u) = Σ (Kᵢ − kᵢ)²`. Nonnegative, zero exactly at the
/// prescribed-curvature metric.
pub fn energy(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    u: &CoordVector,
) -> Result<f64, SolverError> {
    check_sizes(complex, angles, target, u.len())?;
    let k = curvatures(complex, angles, u)?;
    Ok(energy_of(&k, target))
}

fn energy_of(k: &CurvatureVector, target: &TargetCurvature) -> f64 {
    k.values()
        .iter()
        .zip(target.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn check_sizes(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    n: usize,
) -> Result<(), SolverError> {
    if angles.len() != complex.num_edges() {
        return Err(GeometryError::SizeMismatch {
            what: "angle assignment length",
            got: angles.len(),
            expected: complex.num_edges(),
        }
        .into());
    }
    if target.len() != complex.num_vertices() || n != complex.num_vertices() {
        return Err(GeometryError::SizeMismatch {
            what: "target curvature length",
            got: target.len(),
            expected: complex.num_vertices(),
        }
        .into());
    }
    Ok(())
}

/// The Calabi flow right-hand side `−L(u)·(K(u) − k)`, i.e. `−½ ∇C`.
pub fn calabi_velocity(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    u: &CoordVector,
) -> Result<Vec<f64>, SolverError> {
    check_sizes(complex, angles, target, u.len())?;
    let k = curvatures(complex, angles, u)?;
    let l = jacobian(complex, angles, u)?;
    let g = DVector::from_iterator(
        k.len(),
        k.values().iter().zip(target.values()).map(|(a, b)| a - b),
    );
    let v = -(l.matrix() * g);
    Ok(v.iter().copied().collect())
}

fn ricci_velocity(k: &CurvatureVector, target: &TargetCurvature) -> Vec<f64> {
    k.values()
        .iter()
        .zip(target.values())
        .map(|(a, b)| -(a - b))
        .collect()
}

fn check_preconditions(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    geometry: BackgroundGeometry,
) -> Result<(), SolverError> {
    let deviations = complex.check_c1(angles)?;
    for (face, d) in deviations.iter().enumerate() {
        if d.abs() > C1_TOL {
            return Err(SolverError::C1Violated {
                face,
                deviation: *d,
            });
        }
    }
    if complex.num_vertices() <= MAX_ENUM_VERTICES {
        let report = check_target(complex, angles, target, geometry)?;
        if !report.attainable {
            return Err(SolverError::Unattainable { report });
        }
    }
    Ok(())
}

enum FlowKind {
    Calabi,
    Ricci,
}

struct FlowProblem<'a> {
    complex: &'a SurfaceComplex,
    angles: &'a AngleAssignment,
    target: &'a TargetCurvature,
    geometry: BackgroundGeometry,
    kind: FlowKind,
}

impl FlowProblem<'_> {
    /// Velocity at raw coordinates, `None` when the point leaves the domain.
    fn velocity_at(&self, u_values: &[f64]) -> Result<Option<Vec<f64>>, SolverError> {
        let u = match CoordVector::new(u_values.to_vec(), self.geometry) {
            Ok(u) => u,
            Err(GeometryError::CoordOutOfDomain { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match self.kind {
            FlowKind::Calabi => {
                calabi_velocity(self.complex, self.angles, self.target, &u).map(Some)
            }
            FlowKind::Ricci => {
                let k = curvatures(self.complex, self.angles, &u)?;
                Ok(Some(ricci_velocity(&k, self.target)))
            }
        }
    }
}

enum StepOutcome {
    /// Third-order solution and the scaled local error estimate.
    Advanced {
        u_new: Vec<f64>,
        err_norm: f64,
    },
    ErrorTooLarge {
        err_norm: f64,
    },
    OutOfDomain,
}

/// One Bogacki–Shampine 3(2) attempt from `u` with step `dt`.
fn attempt_step(problem: &FlowProblem, u: &[f64], dt: f64) -> Result<StepOutcome, SolverError> {
    const ATOL: f64 = 1e-10;
    const RTOL: f64 = 1e-8;

    let stage = |base: &[f64], scale: f64, dir: &[f64]| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + scale * d).collect()
    };

    let Some(k1) = problem.velocity_at(u)? else {
        return Ok(StepOutcome::OutOfDomain);
    };
    let Some(k2) = problem.velocity_at(&stage(u, 0.5 * dt, &k1))? else {
        return Ok(StepOutcome::OutOfDomain);
    };
    let Some(k3) = problem.velocity_at(&stage(u, 0.75 * dt, &k2))? else {
        return Ok(StepOutcome::OutOfDomain);
    };
    let u3: Vec<f64> = (0..u.len())
        .map(|i| u[i] + dt * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]))
        .collect();
    let Some(k4) = problem.velocity_at(&u3)? else {
        return Ok(StepOutcome::OutOfDomain);
    };
    let mut err_norm = 0.0f64;
    for i in 0..u.len() {
        let u2 =
            u[i] + dt * (7.0 / 24.0 * k1[i] + 0.25 * k2[i] + 1.0 / 3.0 * k3[i] + 0.125 * k4[i]);
        let scale = ATOL + RTOL * u[i].abs().max(u3[i].abs());
        err_norm = err_norm.max((u3[i] - u2).abs() / scale);
    }
    if !err_norm.is_finite() {
        return Ok(StepOutcome::OutOfDomain);
    }
    if err_norm > 1.0 {
        return Ok(StepOutcome::ErrorTooLarge { err_norm });
    }
    Ok(StepOutcome::Advanced {
        u_new: u3,
        err_norm,
    })
}

struct Recorder {
    stride: u64,
    samples: Vec<TrajectorySample>,
    last_step: u64,
}

impl Recorder {
    fn new(stride: u64) -> Self {
        Self {
            stride,
            samples: Vec::new(),
            last_step: 0,
        }
    }

    fn record(&mut self, step: u64, t: f64, residual: f64, energy: f64, u: &CoordVector) {
        self.samples.push(TrajectorySample {
            t,
            residual,
            energy,
            sum_u: u.sum(),
            u: u.values().to_vec(),
        });
        self.last_step = step;
    }

    fn maybe_record(&mut self, step: u64, t: f64, residual: f64, energy: f64, u: &CoordVector) {
        if step.is_multiple_of(self.stride) {
            self.record(step, t, residual, energy, u);
        }
    }
}

fn run_flow(
    kind: FlowKind,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    r0: &RadiusVector,
    geometry: BackgroundGeometry,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    config.validate()?;
    check_sizes(complex, angles, target, r0.len())?;
    check_preconditions(complex, angles, target, geometry)?;

    let problem = FlowProblem {
        complex,
        angles,
        target,
        geometry,
        kind,
    };
    let mut u = to_coords(r0, geometry);
    let mut k = curvatures(complex, angles, &u)?;
    let mut residual = max_residual(&k, target);
    let mut energy = energy_of(&k, target);
    let mut t = 0.0;
    let mut dt = config.dt_init;
    let mut steps: u64 = 0;
    let mut accepted: u64 = 0;
    let mut rejected: u64 = 0;
    let mut recorder = Recorder::new(config.trajectory_stride);
    recorder.record(0, t, residual, energy, &u);

    while residual > config.residual_tol {
        if steps >= config.max_steps {
            return Err(SolverError::MaxSteps { steps, residual });
        }
        let mut shrink: Option<f64> = None;
        match attempt_step(&problem, u.values(), dt)? {
            StepOutcome::Advanced { u_new, err_norm } => {
                // Domain was checked stage-wise; commit only if the energy
                // monitor agrees.
                let u_new =
                    CoordVector::new(u_new, geometry).expect("accepted step stays in the domain");
                let k_new = curvatures(complex, angles, &u_new)?;
                let e_new = energy_of(&k_new, target);
                if e_new <= energy {
                    t += dt;
                    u = u_new;
                    k = k_new;
                    energy = e_new;
                    residual = max_residual(&k, target);
                    steps += 1;
                    accepted += 1;
                    recorder.maybe_record(steps, t, residual, energy, &u);
                    let factor = (0.9 * err_norm.powf(-1.0 / 3.0)).clamp(0.5, 5.0);
                    dt = (dt * factor).clamp(config.dt_min, config.dt_max);
                } else {
                    shrink = Some(0.5);
                }
            }
            StepOutcome::ErrorTooLarge { err_norm } => {
                shrink = Some((0.9 * err_norm.powf(-1.0 / 3.0)).clamp(0.1, 0.5));
            }
            StepOutcome::OutOfDomain => {
                shrink = Some(0.5);
            }
        }
        if let Some(factor) = shrink {
            rejected += 1;
            let next = dt * factor;
            if next < config.dt_min {
                return Err(SolverError::StepUnderflow { t, dt, residual });
            }
            dt = next;
        }
    }

    if recorder.last_step != steps || recorder.samples.is_empty() {
        recorder.record(steps, t, residual, energy, &u);
    }
    Ok(SolveReport {
        converged: true,
        geometry,
        final_r: from_coords(&u).values().to_vec(),
        final_u: u.values().to_vec(),
        final_residual: residual,
        steps,
        accepted_steps: accepted,
        rejected_steps: rejected,
        trajectory: recorder.samples,
    })
}

/// Integrate the combinatorial Calabi flow from `r0` until
/// `max |Kᵢ − kᵢ| ≤ residual_tol`.
pub fn run_calabi(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    r0: &RadiusVector,
    geometry: BackgroundGeometry,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    run_flow(
        FlowKind::Calabi,
        complex,
        angles,
        target,
        r0,
        geometry,
        config,
    )
}

/// Integrate the combinatorial Ricci flow `du/dt = −(K − k)`; a comparator
/// for the Calabi limit (both converge to the same metric).
pub fn run_ricci(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    r0: &RadiusVector,
    geometry: BackgroundGeometry,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    run_flow(
        FlowKind::Ricci,
        complex,
        angles,
        target,
        r0,
        geometry,
        config,
    )
}

/// Damped Newton iteration on `K(u) = k` with `L` as the derivative.
///
/// In Euclidean background geometry the kernel direction is handled by a
/// rank-one shift `L + (1/N)𝟙𝟙ᵀ` and updates are projected back onto the
/// zero-mean subspace, so `Σu` is preserved across iterations.
pub fn run_newton(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    r0: &RadiusVector,
    geometry: BackgroundGeometry,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    config.validate()?;
    check_sizes(complex, angles, target, r0.len())?;
    check_preconditions(complex, angles, target, geometry)?;

    let n = complex.num_vertices();
    let mut u = to_coords(r0, geometry);
    let mut k = curvatures(complex, angles, &u)?;
    let mut residual = max_residual(&k, target);
    let mut iters: u64 = 0;
    let mut accepted: u64 = 0;
    let mut rejected: u64 = 0;
    let mut recorder = Recorder::new(config.trajectory_stride);
    recorder.record(0, 0.0, residual, energy_of(&k, target), &u);

    while residual > config.residual_tol {
        if iters >= config.max_steps {
            return Err(SolverError::MaxSteps {
                steps: iters,
                residual,
            });
        }
        let mut m = jacobian(complex, angles, &u)?.into_matrix();
        if geometry == BackgroundGeometry::Euclidean {
            m += DMatrix::from_element(n, n, 1.0 / n as f64);
        }
        let chol = Cholesky::new(m).ok_or(SolverError::SingularSystem)?;
        let g = DVector::from_iterator(
            n,
            k.values().iter().zip(target.values()).map(|(a, b)| a - b),
        );
        let mut d = chol.solve(&g);
        if geometry == BackgroundGeometry::Euclidean {
            let mean = d.sum() / n as f64;
            d.add_scalar_mut(-mean);
        }

        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = u
                .values()
                .iter()
                .zip(d.iter())
                .map(|(ui, di)| ui - alpha * di)
                .collect();
            if let Ok(u_try) = CoordVector::new(trial, geometry) {
                let k_try = curvatures(complex, angles, &u_try)?;
                let res_try = max_residual(&k_try, target);
                if res_try < residual {
                    u = u_try;
                    k = k_try;
                    residual = res_try;
                    break;
                }
            }
            rejected += 1;
            alpha *= 0.5;
            if alpha < 1e-12 {
                return Err(SolverError::NoProgress {
                    iteration: iters,
                    residual,
                });
            }
        }
        iters += 1;
        accepted += 1;
        recorder.maybe_record(iters, iters as f64, residual, energy_of(&k, target), &u);
    }

    if recorder.last_step != iters || recorder.samples.is_empty() {
        recorder.record(iters, iters as f64, residual, energy_of(&k, target), &u);
    }
    Ok(SolveReport {
        converged: true,
        geometry,
        final_r: from_coords(&u).values().to_vec(),
        final_u: u.values().to_vec(),
        final_residual: residual,
        steps: iters,
        accepted_steps: accepted,
        rejected_steps: rejected,
        trajectory: recorder.samples,
    })
}

/// Dispatch on [`SolverKind`].
pub fn run(
    kind: SolverKind,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    r0: &RadiusVector,
    geometry: BackgroundGeometry,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    match kind {
        SolverKind::Calabi => run_calabi(complex, angles, target, r0, geometry, config),
        SolverKind::Ricci => run_ricci(complex, angles, target, r0, geometry, config),
        SolverKind::Newton => run_newton(complex, angles, target, r0, geometry, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{load_fixture, seeded_radii};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn zero_target(n: usize) -> TargetCurvature {
        TargetCurvature::zero(n)
    }

    #[test]
    fn one_vertex_euclidean_velocity_is_exactly_zero() {
        let (complex, angles) = load_fixture("torus1.json");
        for r in [0.3, 1.0, 4.0] {
            let u = to_coords(
                &RadiusVector::new(vec![r]).unwrap(),
                BackgroundGeometry::Euclidean,
            );
            let v = calabi_velocity(&complex, &angles, &zero_target(1), &u).unwrap();
            assert_eq!(v, vec![0.0], "L is the 1x1 zero matrix");
        }
    }

    #[test]
    fn euclidean_velocity_sums_to_zero() {
        let (complex, angles) = load_fixture("torus2.json");
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let r = seeded_radii(&mut rng, 2);
            let u = to_coords(&r, BackgroundGeometry::Euclidean);
            let v = calabi_velocity(&complex, &angles, &zero_target(2), &u).unwrap();
            assert!(v.iter().sum::<f64>().abs() <= 1e-10);
        }
    }

    #[test]
    fn velocity_vanishes_at_fixed_point() {
        let (complex, angles) = load_fixture("genus2.json");
        let report = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let u = CoordVector::new(report.final_u.clone(), BackgroundGeometry::Hyperbolic).unwrap();
        let v = calabi_velocity(&complex, &angles, &zero_target(2), &u).unwrap();
        for vi in v {
            assert!(vi.abs() <= 1e-9, "velocity {vi} at the fixed point");
        }
    }

    #[test]
    fn calabi_genus2_converges_to_gauss_bonnet_area() {
        let (complex, angles) = load_fixture("genus2.json");
        let report = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(report.converged);
        assert!(report.final_residual <= 1e-10);
        let r = RadiusVector::new(report.final_r.clone()).unwrap();
        let area =
            crate::geometry::total_area(&complex, &angles, &r, BackgroundGeometry::Hyperbolic)
                .unwrap();
        assert!(
            (area - 4.0 * PI).abs() <= 1e-6,
            "area {area} vs 4pi (ΣK = 2πχ + Area with χ = -2)"
        );
        // Energy is nonincreasing across the sampled trajectory.
        for w in report.trajectory.windows(2) {
            assert!(w[1].energy <= w[0].energy);
        }
        // Hyperbolic domain is preserved.
        for s in &report.trajectory {
            assert!(s.u.iter().all(|&ui| ui < 0.0));
        }
    }

    #[test]
    fn calabi_limit_is_independent_of_start() {
        let (complex, angles) = load_fixture("genus2.json");
        let a = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let b = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![0.2, 3.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        for (x, y) in a.final_r.iter().zip(&b.final_r) {
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn one_vertex_torus_converges_at_step_zero() {
        let (complex, angles) = load_fixture("torus1.json");
        for r in [0.1, 1.0, 9.0] {
            let report = run_calabi(
                &complex,
                &angles,
                &zero_target(1),
                &RadiusVector::new(vec![r]).unwrap(),
                BackgroundGeometry::Euclidean,
                &SolverConfig::default(),
            )
            .unwrap();
            assert_eq!(report.steps, 0);
            assert!(report.final_residual <= 1e-13);
            assert_eq!(report.trajectory.len(), 1);
        }
    }

    #[test]
    fn ricci_agrees_with_calabi() {
        let (complex, angles) = load_fixture("genus2.json");
        let r0 = RadiusVector::new(vec![1.0, 1.0]).unwrap();
        let calabi = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &r0,
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let ricci = run_ricci(
            &complex,
            &angles,
            &zero_target(2),
            &r0,
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        for (x, y) in calabi.final_r.iter().zip(&ricci.final_r) {
            assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn starting_at_the_fixed_point_takes_no_steps() {
        let (complex, angles) = load_fixture("genus2.json");
        let solved = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let again = run_ricci(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(solved.final_r).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(again.steps, 0);
    }

    #[test]
    fn euclidean_flows_conserve_sum_u() {
        let (complex, angles) = load_fixture("torus2.json");
        let r0 = RadiusVector::new(vec![0.7, 2.1]).unwrap();
        for kind in [SolverKind::Calabi, SolverKind::Ricci] {
            let report = run(
                kind,
                &complex,
                &angles,
                &zero_target(2),
                &r0,
                BackgroundGeometry::Euclidean,
                &SolverConfig::default(),
            )
            .unwrap();
            assert!(report.converged, "{kind} on torus2");
            let s0 = report.trajectory[0].sum_u;
            for s in &report.trajectory {
                assert!(
                    (s.sum_u - s0).abs() <= 1e-9,
                    "{kind}: sum u drifted by {}",
                    s.sum_u - s0
                );
            }
        }
    }

    #[test]
    fn newton_converges_fast_to_the_same_limit() {
        let (complex, angles) = load_fixture("genus2.json");
        let r0 = RadiusVector::new(vec![1.0, 1.0]).unwrap();
        let calabi = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &r0,
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let newton = run_newton(
            &complex,
            &angles,
            &zero_target(2),
            &r0,
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(newton.steps <= 20, "took {} iterations", newton.steps);
        for (x, y) in calabi.final_r.iter().zip(&newton.final_r) {
            assert!((x - y).abs() <= 1e-8);
        }

        let again = run_newton(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(newton.final_r).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(again.steps, 0);
    }

    #[test]
    fn newton_euclidean_preserves_sum_u() {
        let (complex, angles) = load_fixture("torus2.json");
        let report = run_newton(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![0.4, 1.9]).unwrap(),
            BackgroundGeometry::Euclidean,
            &SolverConfig::default(),
        )
        .unwrap();
        let s0 = report.trajectory[0].sum_u;
        let s1 = report.trajectory.last().unwrap().sum_u;
        assert!((s1 - s0).abs() <= 1e-12, "drift {}", s1 - s0);
    }

    #[test]
    fn nonzero_hyperbolic_target_hits_prescribed_curvatures() {
        let (complex, angles) = load_fixture("genus2.json");
        let target = TargetCurvature::new(vec![-1.0, 0.5]);
        let calabi = run_calabi(
            &complex,
            &angles,
            &target,
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        let u = CoordVector::new(calabi.final_u.clone(), BackgroundGeometry::Hyperbolic).unwrap();
        let k = curvatures(&complex, &angles, &u).unwrap();
        assert!((k.values()[0] - -1.0).abs() <= 1e-10);
        assert!((k.values()[1] - 0.5).abs() <= 1e-10);
        // Gauss-Bonnet pins the area: Area = Σk - 2πχ with χ = -2.
        let r = RadiusVector::new(calabi.final_r.clone()).unwrap();
        let area =
            crate::geometry::total_area(&complex, &angles, &r, BackgroundGeometry::Hyperbolic)
                .unwrap();
        let expected = -0.5 + 4.0 * PI;
        assert!((area - expected).abs() <= 1e-6, "area {area} vs {expected}");

        let newton = run_newton(
            &complex,
            &angles,
            &target,
            &RadiusVector::new(vec![2.0, 0.3]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap();
        for (a, b) in calabi.final_r.iter().zip(&newton.final_r) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn nonzero_euclidean_target_converges_on_the_slice() {
        let (complex, angles) = load_fixture("torus2.json");
        // Σk must vanish for a torus; the split between the vertices is free.
        let target = TargetCurvature::new(vec![0.4, -0.4]);
        let report = run_calabi(
            &complex,
            &angles,
            &target,
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Euclidean,
            &SolverConfig::default(),
        )
        .unwrap();
        let u = CoordVector::new(report.final_u.clone(), BackgroundGeometry::Euclidean).unwrap();
        let k = curvatures(&complex, &angles, &u).unwrap();
        assert!((k.values()[0] - 0.4).abs() <= 1e-10);
        assert!((k.values()[1] - -0.4).abs() <= 1e-10);
        let s0 = report.trajectory[0].sum_u;
        for s in &report.trajectory {
            assert!((s.sum_u - s0).abs() <= 1e-9);
        }
    }

    #[test]
    fn unattainable_target_is_refused() {
        let (complex, angles) = load_fixture("genus2_tight.json");
        let err = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![1.0, 1.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SolverError::Unattainable { .. }), "{err}");
    }

    #[test]
    fn c1_violation_is_refused() {
        let (complex, _) = load_fixture("torus1.json");
        let bad = AngleAssignment::new(vec![std::f64::consts::FRAC_PI_2; 3]).unwrap();
        let err = run_calabi(
            &complex,
            &bad,
            &zero_target(1),
            &RadiusVector::new(vec![1.0]).unwrap(),
            BackgroundGeometry::Euclidean,
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SolverError::C1Violated { .. }), "{err}");
    }

    #[test]
    fn step_budget_exhaustion_is_an_error() {
        let (complex, angles) = load_fixture("torus2.json");
        let cfg = SolverConfig {
            max_steps: 2,
            ..SolverConfig::default()
        };
        let err = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![0.1, 9.0]).unwrap(),
            BackgroundGeometry::Euclidean,
            &cfg,
        )
        .unwrap_err();
        assert!(
            matches!(err, SolverError::MaxSteps { steps: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn frozen_step_size_underflows_instead_of_looping() {
        // With dt pinned to a single large value, the first rejection cannot
        // shrink the step and must surface as an underflow error.
        let (complex, angles) = load_fixture("genus2.json");
        let cfg = SolverConfig {
            dt_init: 10.0,
            dt_min: 10.0,
            dt_max: 10.0,
            ..SolverConfig::default()
        };
        let err = run_calabi(
            &complex,
            &angles,
            &zero_target(2),
            &RadiusVector::new(vec![0.1, 9.0]).unwrap(),
            BackgroundGeometry::Hyperbolic,
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, SolverError::StepUnderflow { .. }), "{err}");
    }

    #[test]
    fn config_validation() {
        let cfg = SolverConfig {
            dt_min: 1.0,
            dt_init: 0.1,
            ..SolverConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(SolverError::Config(_))));
        let cfg = SolverConfig {
            trajectory_stride: 0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            residual_tol: -1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
