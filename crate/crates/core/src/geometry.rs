//! Thurston's construction for circle patterns: edge lengths, two-circle
//! configuration angles and their derivatives, discrete curvature, and the
//! curvature Jacobian in `u`-coordinates.
//!
//! Everything here is a pure function of immutable inputs. The analytic
//! derivative formulas are the production path; finite differences are used
//! only as oracles in the test suites.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::{AngleAssignment, EdgeEnd, SurfaceComplex};

/// The constant-curvature model in which triangles are built and glued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackgroundGeometry {
    Hyperbolic,
    Euclidean,
}

impl std::fmt::Display for BackgroundGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BackgroundGeometry::Hyperbolic => write!(f, "hyperbolic"),
            BackgroundGeometry::Euclidean => write!(f, "euclidean"),
        }
    }
}

impl std::str::FromStr for BackgroundGeometry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hyperbolic" => Ok(BackgroundGeometry::Hyperbolic),
            "euclidean" => Ok(BackgroundGeometry::Euclidean),
            other => Err(format!(
                "unknown geometry {other:?}; expected \"hyperbolic\" or \"euclidean\""
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("radius must be positive and finite, got {value}")]
    BadRadius { value: f64 },
    #[error("radius[{index}] must be positive and finite, got {value}")]
    BadRadiusAt { index: usize, value: f64 },
    #[error("exterior intersection angle must lie in (0, pi), got {value}")]
    BadTheta { value: f64 },
    #[error("u[{index}] = {value} is outside the domain of the geometry")]
    CoordOutOfDomain { index: usize, value: f64 },
    #[error("{what}: got {got}, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("total_area is defined in hyperbolic background geometry only")]
    EuclideanArea,
}

/// A positive radius per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusVector {
    r: Vec<f64>,
}

impl RadiusVector {
    pub fn new(r: Vec<f64>) -> Result<Self, GeometryError> {
        for (i, &v) in r.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::BadRadiusAt { index: i, value: v });
            }
        }
        Ok(Self { r })
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Radii in the coordinates that make the curvature Jacobian symmetric:
/// `u = ln tanh(r/2)` in hyperbolic background geometry (so `u < 0`) and
/// `u = ln r` in Euclidean background geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordVector {
    u: Vec<f64>,
    geometry: BackgroundGeometry,
}

impl CoordVector {
    pub fn new(u: Vec<f64>, geometry: BackgroundGeometry) -> Result<Self, GeometryError> {
        for (i, &v) in u.iter().enumerate() {
            let ok = match geometry {
                BackgroundGeometry::Hyperbolic => v.is_finite() && v < 0.0,
                BackgroundGeometry::Euclidean => v.is_finite(),
            };
            if !ok {
                return Err(GeometryError::CoordOutOfDomain { index: i, value: v });
            }
        }
        Ok(Self { u, geometry })
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn geometry(&self) -> BackgroundGeometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.u.iter().sum()
    }
}

/// Discrete curvatures `Kᵢ = 2π − σ(vᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureVector {
    k: Vec<f64>,
}

impl CurvatureVector {
    pub fn values(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.k
    }
}

/// The matrix `L` with `L[j][i] = ∂Kⱼ/∂uᵢ`. Symmetric; positive definite in
/// hyperbolic background geometry, positive semidefinite with kernel spanned
/// by the all-ones vector in Euclidean background geometry.
#[derive(Clone, Debug)]
pub struct CurvatureJacobian {
    matrix: DMatrix<f64>,
}

impl CurvatureJacobian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

fn check_scalar_inputs(r_i: f64, r_j: f64, theta: f64) -> Result<(), GeometryError> {
    for r in [r_i, r_j] {
        if !(r.is_finite() && r > 0.0) {
            return Err(GeometryError::BadRadius { value: r });
        }
    }
    if !(theta.is_finite() && theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(GeometryError::BadTheta { value: theta });
    }
    Ok(())
}

/// Change of variables radii → u-coordinates.
pub fn to_coords(r: &RadiusVector, geometry: BackgroundGeometry) -> CoordVector {
    let u = r
        .values()
        .iter()
        .map(|&ri| match geometry {
            BackgroundGeometry::Euclidean => ri.ln(),
            BackgroundGeometry::Hyperbolic => {
                // ln tanh(r/2) = -2 artanh(e^{-r}): the right-hand form keeps
                // full relative precision for large r where tanh(r/2) -> 1.
                if ri <= 1.0 {
                    (0.5 * ri).tanh().ln()
                } else {
                    -2.0 * (-ri).exp().atanh()
                }
            }
        })
        .collect();
    CoordVector { u, geometry }
}

/// Inverse change of variables. Total because [`CoordVector`] enforces the
/// domain (`u < 0` hyperbolically) at construction.
pub fn from_coords(u: &CoordVector) -> RadiusVector {
    let r = u
        .values()
        .iter()
        .map(|&ui| match u.geometry {
            BackgroundGeometry::Euclidean => ui.exp(),
            BackgroundGeometry::Hyperbolic => {
                // r = 2 artanh(e^u); for u near 0 expand through expm1 to
                // avoid the 1 - e^u cancellation.
                if ui <= -1.0 {
                    2.0 * ui.exp().atanh()
                } else {
                    (1.0 + ui.exp()).ln() - (-f64::exp_m1(ui)).ln()
                }
            }
        })
        .collect();
    RadiusVector { r }
}

/// Length assigned to an edge joining circles of radii `r_i`, `r_j` crossing
/// at exterior angle `theta`.
///
/// Hyperbolic lengths are evaluated as `l = ln1p(δ + √(δ(δ+2)))` with
/// `δ = cosh l − 1 = 2 sinh²((rᵢ−rⱼ)/2) + 2 sinh rᵢ sinh rⱼ cos²(θ/2)`,
/// a sum of nonnegative terms. This keeps precision where `cosh l` is close
/// to 1 (both radii small), which the naive `arccosh` form loses.
pub fn edge_length(
    r_i: f64,
    r_j: f64,
    theta: f64,
    geometry: BackgroundGeometry,
) -> Result<f64, GeometryError> {
    check_scalar_inputs(r_i, r_j, theta)?;
    Ok(match geometry {
        BackgroundGeometry::Euclidean => euclidean_length_sq(r_i, r_j, theta).sqrt(),
        BackgroundGeometry::Hyperbolic => {
            let delta = hyperbolic_delta(r_i, r_j, theta);
            f64::ln_1p(delta + (delta * (delta + 2.0)).sqrt())
        }
    })
}

/// `l²` in Euclidean background geometry, as a cancellation-free sum.
fn euclidean_length_sq(r_i: f64, r_j: f64, theta: f64) -> f64 {
    let c = (0.5 * theta).cos();
    (r_i - r_j).powi(2) + 4.0 * r_i * r_j * c * c
}

/// `cosh l − 1` in hyperbolic background geometry, as a cancellation-free sum.
fn hyperbolic_delta(r_i: f64, r_j: f64, theta: f64) -> f64 {
    let c = (0.5 * theta).cos();
    let s = (0.5 * (r_i - r_j)).sinh();
    2.0 * s * s + 2.0 * r_i.sinh() * r_j.sinh() * c * c
}

/// The inner angle `ϑᵢ` at the center `vᵢ` of the two-circle configuration
/// triangle with sides `rᵢ`, `rⱼ`, `l`.
pub fn center_angle(
    r_i: f64,
    r_j: f64,
    theta: f64,
    geometry: BackgroundGeometry,
) -> Result<f64, GeometryError> {
    check_scalar_inputs(r_i, r_j, theta)?;
    Ok(two_circle(r_i, r_j, theta, geometry).theta_i)
}

/// `(∂ϑᵢ/∂uᵢ, ∂ϑᵢ/∂uⱼ)` for the two-circle configuration. The off-diagonal
/// derivative is symmetric in `i ↔ j`; the diagonal one is negative.
pub fn center_angle_derivatives(
    r_i: f64,
    r_j: f64,
    theta: f64,
    geometry: BackgroundGeometry,
) -> Result<(f64, f64), GeometryError> {
    check_scalar_inputs(r_i, r_j, theta)?;
    let tc = two_circle(r_i, r_j, theta, geometry);
    Ok((tc.d_diag_i, tc.d_off))
}

/// Everything the assembly loops need about one edge's configuration.
struct TwoCircle {
    /// Angle at the first (tail) center.
    theta_i: f64,
    /// Angle at the second (head) center.
    theta_j: f64,
    /// ∂ϑᵢ/∂uᵢ.
    d_diag_i: f64,
    /// ∂ϑⱼ/∂uⱼ.
    d_diag_j: f64,
    /// ∂ϑᵢ/∂uⱼ = ∂ϑⱼ/∂uᵢ.
    d_off: f64,
}

/// Closed forms via `atan2`, which needs no clamping:
///
/// * Euclidean: `ϑᵢ = atan2(rⱼ sin Θ, rᵢ + rⱼ cos Θ)`,
///   `∂ϑᵢ/∂uᵢ = −rᵢrⱼ sin Θ / l²`, `∂ϑᵢ/∂uⱼ = +rᵢrⱼ sin Θ / l²`.
/// * Hyperbolic: `ϑᵢ = atan2(sinh rⱼ sin Θ, sinh rᵢ cosh rⱼ + cosh rᵢ sinh rⱼ cos Θ)`,
///   `∂ϑᵢ/∂uⱼ = sinh rᵢ sinh rⱼ sin Θ / sinh² l`, `∂ϑᵢ/∂uᵢ = −cosh l · ∂ϑᵢ/∂uⱼ`.
///
/// The diagonal derivative is negative and the off-diagonal one positive and
/// symmetric by construction; the test suites check both against finite
/// differences.
fn two_circle(r_i: f64, r_j: f64, theta: f64, geometry: BackgroundGeometry) -> TwoCircle {
    let (sin_t, cos_t) = theta.sin_cos();
    match geometry {
        BackgroundGeometry::Euclidean => {
            let lsq = euclidean_length_sq(r_i, r_j, theta);
            let w = r_i * r_j * sin_t / lsq;
            TwoCircle {
                theta_i: f64::atan2(r_j * sin_t, r_i + r_j * cos_t),
                theta_j: f64::atan2(r_i * sin_t, r_j + r_i * cos_t),
                d_diag_i: -w,
                d_diag_j: -w,
                d_off: w,
            }
        }
        BackgroundGeometry::Hyperbolic => {
            let (shi, chi) = (r_i.sinh(), r_i.cosh());
            let (shj, chj) = (r_j.sinh(), r_j.cosh());
            let delta = hyperbolic_delta(r_i, r_j, theta);
            let sinh_sq_l = delta * (delta + 2.0);
            let w = shi * shj * sin_t / sinh_sq_l;
            let d_diag = -(1.0 + delta) * w;
            TwoCircle {
                theta_i: f64::atan2(shj * sin_t, shi * chj + chi * shj * cos_t),
                theta_j: f64::atan2(shi * sin_t, shj * chi + chj * shi * cos_t),
                d_diag_i: d_diag,
                d_diag_j: d_diag,
                d_off: w,
            }
        }
    }
}

fn check_assembly_inputs(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    n: usize,
) -> Result<(), GeometryError> {
    if angles.len() != complex.num_edges() {
        return Err(GeometryError::SizeMismatch {
            what: "angle assignment length",
            got: angles.len(),
            expected: complex.num_edges(),
        });
    }
    if n != complex.num_vertices() {
        return Err(GeometryError::SizeMismatch {
            what: "coordinate vector length",
            got: n,
            expected: complex.num_vertices(),
        });
    }
    Ok(())
}

fn configured_edges(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    r: &[f64],
    geometry: BackgroundGeometry,
) -> Vec<TwoCircle> {
    complex
        .edges()
        .iter()
        .zip(angles.theta())
        .map(|(&[t, h], &theta)| two_circle(r[t], r[h], theta, geometry))
        .collect()
}

fn end_angle(tc: &TwoCircle, end: EdgeEnd) -> f64 {
    match end {
        EdgeEnd::Tail => tc.theta_i,
        EdgeEnd::Head => tc.theta_j,
    }
}

/// Discrete curvatures `Kᵢ = 2π − σ(vᵢ)`, assembled edge-wise: on a closed
/// surface every edge borders two faces, so each incident edge end
/// contributes its configuration angle twice to `σ`.
pub fn curvatures(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    u: &CoordVector,
) -> Result<CurvatureVector, GeometryError> {
    check_assembly_inputs(complex, angles, u.len())?;
    let r = from_coords(u);
    let tcs = configured_edges(complex, angles, r.values(), u.geometry());
    let n = complex.num_vertices();
    let mut end_sum = vec![0.0; n];
    for (e, &[t, h]) in complex.edges().iter().enumerate() {
        end_sum[t] += tcs[e].theta_i;
        end_sum[h] += tcs[e].theta_j;
    }
    let k: Vec<f64> = end_sum
        .iter()
        .map(|&s| 2.0 * std::f64::consts::PI - 2.0 * s)
        .collect();
    #[cfg(debug_assertions)]
    {
        let by_corners = corner_curvatures(complex, &tcs, n);
        for (i, (a, b)) in k.iter().zip(&by_corners).enumerate() {
            debug_assert!(
                (a - b).abs() <= 1e-12,
                "edge-based and corner-based curvature disagree at vertex {i}: {a} vs {b}"
            );
        }
    }
    Ok(CurvatureVector { k })
}

/// Reference curvature path: sum the two flanking configuration angles of
/// every face corner. Used to cross-check the edge-based assembly.
pub fn curvatures_by_corners(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    u: &CoordVector,
) -> Result<CurvatureVector, GeometryError> {
    check_assembly_inputs(complex, angles, u.len())?;
    let r = from_coords(u);
    let tcs = configured_edges(complex, angles, r.values(), u.geometry());
    Ok(CurvatureVector {
        k: corner_curvatures(complex, &tcs, complex.num_vertices()),
    })
}

fn corner_curvatures(complex: &SurfaceComplex, tcs: &[TwoCircle], n: usize) -> Vec<f64> {
    let mut sigma = vec![0.0; n];
    for f in 0..complex.num_faces() {
        for c in 0..3 {
            let corner = complex.corner(f, c);
            sigma[corner.vertex] += end_angle(&tcs[corner.in_end.edge], corner.in_end.end)
                + end_angle(&tcs[corner.out_end.edge], corner.out_end.end);
        }
    }
    sigma
        .iter()
        .map(|&s| 2.0 * std::f64::consts::PI - s)
        .collect()
}

/// The curvature Jacobian `L[j][i] = ∂Kⱼ/∂uᵢ`, assembled from the two-circle
/// derivatives. Self-loop edges route all four derivative terms onto the
/// diagonal.
pub fn jacobian(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    u: &CoordVector,
) -> Result<CurvatureJacobian, GeometryError> {
    check_assembly_inputs(complex, angles, u.len())?;
    let r = from_coords(u);
    let tcs = configured_edges(complex, angles, r.values(), u.geometry());
    let n = complex.num_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (e, &[t, h]) in complex.edges().iter().enumerate() {
        let tc = &tcs[e];
        m[(t, t)] += -2.0 * tc.d_diag_i;
        m[(h, h)] += -2.0 * tc.d_diag_j;
        m[(t, h)] += -2.0 * tc.d_off;
        m[(h, t)] += -2.0 * tc.d_off;
    }
    Ok(CurvatureJacobian { matrix: m })
}

/// Total hyperbolic area: the angle deficit `π − angle sum` summed over all
/// `3F` sub-triangles, i.e. `2 Σₑ (Θₑ − ϑᵢ − ϑⱼ)`.
pub fn total_area(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    r: &RadiusVector,
    geometry: BackgroundGeometry,
) -> Result<f64, GeometryError> {
    if geometry == BackgroundGeometry::Euclidean {
        return Err(GeometryError::EuclideanArea);
    }
    check_assembly_inputs(complex, angles, r.len())?;
    let tcs = configured_edges(complex, angles, r.values(), geometry);
    Ok(tcs
        .iter()
        .zip(angles.theta())
        .map(|(tc, &theta)| 2.0 * (theta - tc.theta_i - tc.theta_j))
        .sum())
}
