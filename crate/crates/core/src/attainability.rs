//! Attainability of prescribed curvature vectors.
//!
//! A target is attainable exactly when it satisfies the per-vertex upper
//! bound `kᵢ < 2π` together with one linear inequality per nonempty vertex
//! subset `A`:
//!
//! ```text
//! Σ_{vᵢ∈A} kᵢ  ?  2π|A| − 2 Σ_{e: ∂e∩A≠∅} Θ(e)
//! ```
//!
//! strict (`>`) for every `A` in hyperbolic background geometry; non-strict
//! in Euclidean background geometry with equality exactly at `A = V`.
//! Subsets are enumerated exhaustively, so the check is guarded to desk
//! scale (`N ≤ 25`).

use serde::Serialize;

use crate::complex::{AngleAssignment, SurfaceComplex};
use crate::geometry::BackgroundGeometry;

/// Enumeration guard: 2^N − 1 subsets are visited.
pub const MAX_ENUM_VERTICES: usize = 25;

/// Absolute slack tolerance for the floating-point inequality checks.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum AttainabilityError {
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("{num_vertices} vertices exceed the enumeration guard of {max}")]
    TooManyVertices { num_vertices: usize, max: usize },
    #[error("{what}: got {got}, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
}

/// Prescribed curvatures, one per vertex. Whether they are attainable is a
/// separate judgment made by [`check_target`].
#[derive(Clone, Debug, PartialEq)]
pub struct TargetCurvature {
    k: Vec<f64>,
}

impl TargetCurvature {
    pub fn new(k: Vec<f64>) -> Self {
        Self { k }
    }

    pub fn zero(n: usize) -> Self {
        Self { k: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailedCondition {
    None,
    UpperBound,
    SubsetInequality,
    EqualityAtV,
}

/// Outcome of [`check_target`]. `margin` is the smallest slack seen across
/// every check; `witness_subset` is the subset realizing it (absent when the
/// upper bound already fails, before any subset is enumerated).
#[derive(Clone, Debug, Serialize)]
pub struct AttainabilityReport {
    pub attainable: bool,
    pub failed_condition: FailedCondition,
    pub witness_subset: Option<Vec<usize>>,
    pub margin: f64,
}

/// `Σ Θ(e)` over edges with at least one endpoint in the subset, each edge
/// counted once; a self-loop at a subset vertex counts once.
pub fn boundary_theta_sum(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    subset: &[usize],
) -> Result<f64, AttainabilityError> {
    if subset.is_empty() {
        return Err(AttainabilityError::EmptySubset);
    }
    check_sizes(complex, angles, complex.num_vertices())?;
    let mut in_subset = vec![false; complex.num_vertices()];
    for &v in subset {
        if v >= complex.num_vertices() {
            return Err(AttainabilityError::VertexOutOfRange {
                vertex: v,
                num_vertices: complex.num_vertices(),
            });
        }
        in_subset[v] = true;
    }
    Ok(complex
        .edges()
        .iter()
        .zip(angles.theta())
        .filter(|(&[t, h], _)| in_subset[t] || in_subset[h])
        .map(|(_, &theta)| theta)
        .sum())
}

fn check_sizes(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target_len: usize,
) -> Result<(), AttainabilityError> {
    if angles.len() != complex.num_edges() {
        return Err(AttainabilityError::SizeMismatch {
            what: "angle assignment length",
            got: angles.len(),
            expected: complex.num_edges(),
        });
    }
    if target_len != complex.num_vertices() {
        return Err(AttainabilityError::SizeMismatch {
            what: "target curvature length",
            got: target_len,
            expected: complex.num_vertices(),
        });
    }
    Ok(())
}

/// Decide attainability of `target` by exhaustive subset enumeration.
///
/// Subsets are visited in fixed bitmask order and ties in the worst margin
/// keep the first subset encountered, so reports are deterministic.
pub fn check_target(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    target: &TargetCurvature,
    geometry: BackgroundGeometry,
) -> Result<AttainabilityReport, AttainabilityError> {
    check_sizes(complex, angles, target.len())?;
    let n = complex.num_vertices();
    if n > MAX_ENUM_VERTICES {
        return Err(AttainabilityError::TooManyVertices {
            num_vertices: n,
            max: MAX_ENUM_VERTICES,
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    if n == 0 {
        return Ok(AttainabilityReport {
            attainable: true,
            failed_condition: FailedCondition::None,
            witness_subset: None,
            margin: f64::INFINITY,
        });
    }

    let upper_slack = target
        .values()
        .iter()
        .fold(f64::INFINITY, |m, &k| m.min(two_pi - k));
    if upper_slack <= 0.0 {
        return Ok(AttainabilityReport {
            attainable: false,
            failed_condition: FailedCondition::UpperBound,
            witness_subset: None,
            margin: upper_slack,
        });
    }

    let edge_masks: Vec<u32> = complex
        .edges()
        .iter()
        .map(|&[t, h]| (1u32 << t) | (1u32 << h))
        .collect();
    let full: u32 = (1u32 << n) - 1;

    let mut min_slack = f64::INFINITY;
    let mut min_mask = 0u32;
    let mut min_proper_slack = f64::INFINITY;
    let mut min_proper_mask = 0u32;
    let mut full_slack = 0.0;
    for mask in 1..=full {
        let mut lhs = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                lhs += target.values()[i];
            }
        }
        let theta_sum: f64 = edge_masks
            .iter()
            .zip(angles.theta())
            .filter(|(&em, _)| em & mask != 0)
            .map(|(_, &theta)| theta)
            .sum();
        let rhs = two_pi * f64::from(mask.count_ones()) - 2.0 * theta_sum;
        let slack = lhs - rhs;
        if slack < min_slack {
            min_slack = slack;
            min_mask = mask;
        }
        if mask != full && slack < min_proper_slack {
            min_proper_slack = slack;
            min_proper_mask = mask;
        }
        if mask == full {
            full_slack = slack;
        }
    }

    let margin = upper_slack.min(min_slack);
    let subset_of = |mask: u32| -> Vec<usize> { (0..n).filter(|i| mask & (1 << i) != 0).collect() };

    let report = match geometry {
        BackgroundGeometry::Hyperbolic => {
            if min_slack <= SLACK_TOL {
                AttainabilityReport {
                    attainable: false,
                    failed_condition: FailedCondition::SubsetInequality,
                    witness_subset: Some(subset_of(min_mask)),
                    margin,
                }
            } else {
                AttainabilityReport {
                    attainable: true,
                    failed_condition: FailedCondition::None,
                    witness_subset: Some(subset_of(min_mask)),
                    margin,
                }
            }
        }
        BackgroundGeometry::Euclidean => {
            if n > 1 && min_proper_slack <= SLACK_TOL {
                AttainabilityReport {
                    attainable: false,
                    failed_condition: FailedCondition::SubsetInequality,
                    witness_subset: Some(subset_of(min_proper_mask)),
                    margin,
                }
            } else if full_slack.abs() > SLACK_TOL {
                AttainabilityReport {
                    attainable: false,
                    failed_condition: FailedCondition::EqualityAtV,
                    witness_subset: Some(subset_of(full)),
                    margin,
                }
            } else {
                AttainabilityReport {
                    attainable: true,
                    failed_condition: FailedCondition::None,
                    witness_subset: Some(subset_of(min_mask)),
                    margin,
                }
            }
        }
    };
    Ok(report)
}
