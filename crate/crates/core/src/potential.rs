//! The convex potential `Ψ(u) = ∫ Σ(Kᵢ − kᵢ) duᵢ` and its Lyapunov gap
//! `Λ(u) = Ψ(u) − Ψ(u*)`.
//!
//! The curvature 1-form is closed (its derivative is the symmetric Jacobian
//! `L`), so the path integral is well defined; we evaluate it by adaptive
//! Gauss–Kronrod quadrature along straight segments. Diagnostics only — the
//! solvers never touch this module.

use crate::attainability::TargetCurvature;
use crate::complex::{AngleAssignment, SurfaceComplex};
use crate::geometry::{curvatures, BackgroundGeometry, CoordVector, GeometryError};

/// Default quadrature error budget per segment.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

/// Hyperbolic evaluation points must keep this distance to the `u = 0` wall.
pub const HYPERBOLIC_MARGIN: f64 = 1e-8;

/// Euclidean evaluation points must satisfy `|Σu − Σu₀| ≤` this.
pub const UPSILON_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum PotentialError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("coordinate vector uses {got} geometry, context uses {expected}")]
    GeometryMismatch {
        expected: BackgroundGeometry,
        got: BackgroundGeometry,
    },
    #[error("u[{index}] = {value} is within {margin:e} of the hyperbolic domain boundary")]
    DomainMargin {
        index: usize,
        value: f64,
        margin: f64,
    },
    #[error("Σu = {got} is off the constraint set Σu = {expected} (Euclidean Ψ lives on Υ)")]
    OffConstraintSet { got: f64, expected: f64 },
    #[error("quadrature failed to reach tolerance {tol:e} within depth {depth}")]
    QuadratureDepth { tol: f64, depth: u32 },
    #[error("invalid quadrature tolerance {0}")]
    BadTolerance(f64),
}

/// Base point, target and tolerance for potential evaluations. `Ψ` is the
/// integral from `base` along any path; `Ψ(base) = 0`.
#[derive(Clone, Debug)]
pub struct PotentialContext {
    base: CoordVector,
    target: TargetCurvature,
    quadrature_tol: f64,
}

impl PotentialContext {
    pub fn new(base: CoordVector, target: TargetCurvature) -> Result<Self, PotentialError> {
        check_point(&base, &base)?;
        Ok(Self {
            base,
            target,
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
        })
    }

    pub fn with_quadrature_tol(mut self, tol: f64) -> Result<Self, PotentialError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(PotentialError::BadTolerance(tol));
        }
        self.quadrature_tol = tol;
        Ok(self)
    }

    pub fn base(&self) -> &CoordVector {
        &self.base
    }

    pub fn target(&self) -> &TargetCurvature {
        &self.target
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }
}

/// Domain checks an evaluation point must pass, relative to the base point.
fn check_point(u: &CoordVector, base: &CoordVector) -> Result<(), PotentialError> {
    if u.geometry() != base.geometry() {
        return Err(PotentialError::GeometryMismatch {
            expected: base.geometry(),
            got: u.geometry(),
        });
    }
    match u.geometry() {
        BackgroundGeometry::Hyperbolic => {
            for (i, &v) in u.values().iter().enumerate() {
                if v > -HYPERBOLIC_MARGIN {
                    return Err(PotentialError::DomainMargin {
                        index: i,
                        value: v,
                        margin: HYPERBOLIC_MARGIN,
                    });
                }
            }
        }
        BackgroundGeometry::Euclidean => {
            let got = u.sum();
            let expected = base.sum();
            if (got - expected).abs() > UPSILON_TOL {
                return Err(PotentialError::OffConstraintSet { got, expected });
            }
        }
    }
    Ok(())
}

/// `Ψ(u)`: the 1-form integrated along the straight segment from the context
/// base point to `u`. Euclidean inputs must lie on the same `Υ` slice as the
/// base point; hyperbolic inputs must respect [`HYPERBOLIC_MARGIN`].
pub fn psi(
    ctx: &PotentialContext,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    u: &CoordVector,
) -> Result<f64, PotentialError> {
    check_point(u, &ctx.base)?;
    segment_integral(ctx, complex, angles, ctx.base.values(), u.values())
}

/// `Ψ` along a polyline base → w₁ → … → wₙ. Closedness of the 1-form makes
/// this agree with [`psi`] of the last waypoint, up to quadrature error.
pub fn psi_polyline(
    ctx: &PotentialContext,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    waypoints: &[CoordVector],
) -> Result<f64, PotentialError> {
    let mut total = 0.0;
    let mut prev = ctx.base.values();
    for w in waypoints {
        check_point(w, &ctx.base)?;
        total += segment_integral(ctx, complex, angles, prev, w.values())?;
        prev = w.values();
    }
    Ok(total)
}

/// The Lyapunov function `Λ(u) = Ψ(u) − Ψ(u*)`, with `u*` a converged fixed
/// point. Nonnegative by strict convexity, zero at `u*`.
pub fn lambda(
    ctx: &PotentialContext,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    u: &CoordVector,
    u_star: &CoordVector,
) -> Result<f64, PotentialError> {
    Ok(psi(ctx, complex, angles, u)? - psi(ctx, complex, angles, u_star)?)
}

fn segment_integral(
    ctx: &PotentialContext,
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    from: &[f64],
    to: &[f64],
) -> Result<f64, PotentialError> {
    let dir: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
    if dir.iter().all(|&d| d == 0.0) {
        return Ok(0.0);
    }
    let geometry = ctx.base.geometry();
    let mut integrand = |s: f64| -> Result<f64, PotentialError> {
        let point: Vec<f64> = from.iter().zip(&dir).map(|(f, d)| f + s * d).collect();
        let u = CoordVector::new(point, geometry)?;
        let k = curvatures(complex, angles, &u)?;
        Ok(k.values()
            .iter()
            .zip(ctx.target.values())
            .zip(&dir)
            .map(|((ki, ti), di)| (ki - ti) * di)
            .sum())
    };
    adaptive_gk(&mut integrand, 0.0, 1.0, ctx.quadrature_tol, 0)
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

const MAX_DEPTH: u32 = 48;

fn gk15<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<(f64, f64), E> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let lo = f(center - x)?;
        let hi = f(center + x)?;
        kronrod += WGK[j] * (lo + hi);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    Ok((kronrod * half, (kronrod - gauss).abs() * half.abs()))
}

fn adaptive_gk(
    f: &mut impl FnMut(f64) -> Result<f64, PotentialError>,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, PotentialError> {
    let (value, err) = gk15(f, a, b)?;
    if err <= tol {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(PotentialError::QuadratureDepth { tol, depth });
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive_gk(f, a, mid, 0.5 * tol, depth + 1)?
        + adaptive_gk(f, mid, b, 0.5 * tol, depth + 1)?)
}
