//! Ideal circle pattern metrics on closed triangulated surfaces.
//!
//! Given a Δ-complex triangulation carrying exterior intersection angles
//! Θ(e) ∈ (0, π) per edge and a prescribed curvature vector, this crate
//! decides whether the target is attainable, integrates the combinatorial
//! Calabi flow (with Ricci-flow and Newton cross-checks) down to the ideal
//! circle pattern metric realizing it, and develops the result into the
//! Euclidean plane or the Poincaré disk.
//!
//! The modules:
//!
//! * [`complex`] — Δ-complex triangulations with self-loops and multi-edges,
//!   mesh document parsing, validation, angle assignments.
//! * [`geometry`] — Thurston's construction: edge lengths, two-circle
//!   configuration angles and derivatives, discrete curvature and its
//!   Jacobian in `u`-coordinates, hyperbolic area.
//! * [`attainability`] — subset-inequality characterization of attainable
//!   curvature vectors.
//! * [`flow`] — Calabi / Ricci flow integration and Newton iteration.
//! * [`potential`] — path integral of the curvature 1-form and the
//!   Lyapunov function built from it.
//! * [`layout`] / [`svg`] — development along a face spanning tree and
//!   SVG rendering.

pub mod attainability;
pub mod complex;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod layout;
pub mod potential;
pub mod svg;
#[cfg(test)]
pub(crate) mod testutil;

pub use attainability::{
    boundary_theta_sum, check_target, AttainabilityReport, FailedCondition, TargetCurvature,
};
pub use complex::{load_complex, AngleAssignment, MeshDocument, SurfaceComplex, ValidationReport};
pub use flow::{
    calabi_velocity, energy, run_calabi, run_newton, run_ricci, SolveReport, SolverConfig,
};
pub use geometry::{
    curvatures, jacobian, total_area, BackgroundGeometry, CoordVector, CurvatureJacobian,
    CurvatureVector, RadiusVector,
};
pub use layout::{develop, develop_star, DevelopedLayout};
pub use svg::{to_svg, SvgOptions};
