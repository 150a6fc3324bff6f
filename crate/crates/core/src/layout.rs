//! Development of a circle pattern metric into a simply-connected chart:
//! the Euclidean plane or the Poincaré disk.
//!
//! Faces are placed breadth-first over the face adjacency spanning tree.
//! Faces joined across a tree edge share that edge's endpoint coordinates
//! exactly (positions are copied, not recomputed); non-tree ("seam") edges
//! appear twice and are not geometrically identified — the output is a
//! fundamental domain with visible seams.

use std::collections::VecDeque;

use nalgebra::Complex;

use crate::complex::{AngleAssignment, SurfaceComplex};
use crate::geometry::{center_angle, edge_length, BackgroundGeometry, GeometryError, RadiusVector};

type C = Complex<f64>;

#[derive(Debug, thiserror::Error)]
pub enum LayoutError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("face {face} is numerically degenerate")]
    DegenerateTriangle { face: usize },
    #[error("edge {edge} has no opposite traversal; orientation is broken")]
    OrientationBroken { edge: usize },
    #[error("face {face} left the unit disk")]
    OutsideDisk { face: usize },
    #[error("complex is not face-connected: {unplaced} faces unreachable")]
    Disconnected { unplaced: usize },
    #[error("vertex {vertex} has no incident face corner")]
    NoCorners { vertex: usize },
    #[error("rotation walk around vertex {vertex} did not close")]
    StarWalkBroken { vertex: usize },
}

/// A point of the chart: plane coordinates (Euclidean) or unit-disk
/// coordinates (hyperbolic).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    fn from_c(z: C) -> Self {
        Self { x: z.re, y: z.im }
    }

    fn to_c(self) -> C {
        C::new(self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideKind {
    /// Shared with the adjacent face in the spanning tree; coordinates match.
    Tree,
    /// Cut edge of the fundamental domain.
    Seam,
}

/// One placed face: walk-vertex positions, the interstice point, and how
/// each side relates to the spanning tree.
#[derive(Clone, Debug)]
pub struct PlacedFace {
    pub face: usize,
    /// Vertex ids of the three walk corners.
    pub vertices: [usize; 3],
    pub corners: [ChartPoint; 3],
    pub interstice: ChartPoint,
    pub side_kinds: [SideKind; 3],
}

#[derive(Clone, Debug)]
pub struct DevelopedLayout {
    pub geometry: BackgroundGeometry,
    /// Metric circle radius per complex vertex.
    pub radii: Vec<f64>,
    pub faces: Vec<PlacedFace>,
}

impl DevelopedLayout {
    /// One drawable circle per developed vertex instance. Hyperbolic circles
    /// are converted to their Euclidean images in the disk model.
    pub fn instance_circles(&self) -> Vec<(ChartPoint, f64)> {
        let mut out = Vec::with_capacity(3 * self.faces.len());
        for pf in &self.faces {
            for c in 0..3 {
                let center = pf.corners[c];
                let rho = self.radii[pf.vertices[c]];
                out.push(match self.geometry {
                    BackgroundGeometry::Euclidean => (center, rho),
                    BackgroundGeometry::Hyperbolic => euclidean_image_circle(center.to_c(), rho),
                });
            }
        }
        out
    }
}

/// A hyperbolic circle (hyperbolic center `z`, hyperbolic radius `rho`) is a
/// Euclidean circle in the disk model; exact Möbius-model conversion.
fn euclidean_image_circle(z: C, rho: f64) -> (ChartPoint, f64) {
    let re = (0.5 * rho).tanh();
    let s2 = z.norm_sqr();
    let denom = 1.0 - s2 * re * re;
    let center = z * ((1.0 - re * re) / denom);
    let radius = re * (1.0 - s2) / denom;
    (ChartPoint::from_c(center), radius)
}

/// Geodesic distance measured in the chart.
pub fn chart_distance(geometry: BackgroundGeometry, a: ChartPoint, b: ChartPoint) -> f64 {
    let (a, b) = (a.to_c(), b.to_c());
    match geometry {
        BackgroundGeometry::Euclidean => (a - b).norm(),
        BackgroundGeometry::Hyperbolic => {
            let num = (a - b).norm();
            let den = (C::new(1.0, 0.0) - b.conj() * a).norm();
            2.0 * (num / den).atanh()
        }
    }
}

/// Unsigned angle at `m` between the geodesics towards `a` and `b`. The disk
/// model is conformal, so after translating `m` to the origin the angle is
/// the Euclidean one.
pub fn chart_angle(
    geometry: BackgroundGeometry,
    m: ChartPoint,
    a: ChartPoint,
    b: ChartPoint,
) -> f64 {
    let (m, a, b) = (m.to_c(), a.to_c(), b.to_c());
    let (ta, tb) = match geometry {
        BackgroundGeometry::Euclidean => (a - m, b - m),
        BackgroundGeometry::Hyperbolic => (mobius_to_origin(m, a), mobius_to_origin(m, b)),
    };
    let mut d = (ta.arg() - tb.arg()).abs();
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    d
}

fn mobius_to_origin(q: C, z: C) -> C {
    (z - q) / (C::new(1.0, 0.0) - q.conj() * z)
}

fn mobius_from_origin(q: C, w: C) -> C {
    (w + q) / (C::new(1.0, 0.0) + q.conj() * w)
}

/// Euclidean chart reach of a metric distance from a point at the origin.
fn reach(geometry: BackgroundGeometry, d: f64) -> f64 {
    match geometry {
        BackgroundGeometry::Euclidean => d,
        BackgroundGeometry::Hyperbolic => (0.5 * d).tanh(),
    }
}

/// The point at metric distance `dist` from `q`, in the direction obtained
/// by rotating the geodesic direction `q → toward` counterclockwise by `ccw`.
fn place(geometry: BackgroundGeometry, q: C, toward: C, ccw: f64, dist: f64) -> C {
    match geometry {
        BackgroundGeometry::Euclidean => {
            let dir = (toward - q) / (toward - q).norm();
            q + dir * C::from_polar(dist, ccw)
        }
        BackgroundGeometry::Hyperbolic => {
            let phi = mobius_to_origin(q, toward).arg();
            let w = C::from_polar(reach(geometry, dist), phi + ccw);
            mobius_from_origin(q, w)
        }
    }
}

/// Interior angle between the sides of lengths `l_a`, `l_b` (opposite `l_c`),
/// by the (hyperbolic) law of cosines. The cosine is clamped to `[-1, 1]`
/// to absorb last-bit rounding; an excess beyond 1e-12 means the lengths do
/// not form a triangle.
fn corner_angle_from_lengths(
    geometry: BackgroundGeometry,
    l_a: f64,
    l_b: f64,
    l_c: f64,
    face: usize,
) -> Result<f64, LayoutError> {
    let cos = match geometry {
        BackgroundGeometry::Euclidean => (l_a * l_a + l_b * l_b - l_c * l_c) / (2.0 * l_a * l_b),
        BackgroundGeometry::Hyperbolic => {
            (l_a.cosh() * l_b.cosh() - l_c.cosh()) / (l_a.sinh() * l_b.sinh())
        }
    };
    if !cos.is_finite() || cos.abs() > 1.0 + 1e-12 {
        return Err(LayoutError::DegenerateTriangle { face });
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

struct FaceData {
    /// Walk vertices: `w[i]` = tail of side `i`.
    vertices: [usize; 3],
    /// Metric side lengths: `lengths[i]` joins `w[i]` to `w[i+1]`.
    lengths: [f64; 3],
}

fn face_data(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    r: &RadiusVector,
    geometry: BackgroundGeometry,
    f: usize,
) -> Result<FaceData, LayoutError> {
    let sides = complex.faces()[f];
    let mut vertices = [0usize; 3];
    let mut lengths = [0.0f64; 3];
    for i in 0..3 {
        let (tail, head) = complex.side_endpoints(sides[i]);
        vertices[i] = tail;
        lengths[i] = edge_length(
            r.values()[tail],
            r.values()[head],
            angles.theta()[sides[i].edge],
            geometry,
        )?;
    }
    Ok(FaceData { vertices, lengths })
}

/// Given side `i` of a face placed as `w[i] ↦ tail_pos`, `w[i+1] ↦ head_pos`,
/// place the remaining walk vertex `w[i+2]`, keeping the face counterclockwise.
fn place_third(
    geometry: BackgroundGeometry,
    data: &FaceData,
    side: usize,
    tail_pos: C,
    head_pos: C,
    face: usize,
) -> Result<C, LayoutError> {
    let l_a = data.lengths[side];
    let l_b = data.lengths[(side + 1) % 3];
    let l_c = data.lengths[(side + 2) % 3];
    let alpha = corner_angle_from_lengths(geometry, l_a, l_b, l_c, face)?;
    if chartwise_close(tail_pos, head_pos) {
        return Err(LayoutError::DegenerateTriangle { face });
    }
    Ok(place(geometry, head_pos, tail_pos, -alpha, l_b))
}

fn chartwise_close(a: C, b: C) -> bool {
    (a - b).norm() <= 1e-300
}

/// Develop the metric along a breadth-first spanning tree of faces. The root
/// face is placed canonically: first walk vertex at the origin, first side
/// along the positive axis.
pub fn develop(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    r: &RadiusVector,
    geometry: BackgroundGeometry,
) -> Result<DevelopedLayout, LayoutError> {
    if r.len() != complex.num_vertices() {
        return Err(GeometryError::SizeMismatch {
            what: "radius vector length",
            got: r.len(),
            expected: complex.num_vertices(),
        }
        .into());
    }
    let nf = complex.num_faces();
    let mut layout = DevelopedLayout {
        geometry,
        radii: r.values().to_vec(),
        faces: Vec::with_capacity(nf),
    };
    if nf == 0 {
        return Ok(layout);
    }

    let data: Vec<FaceData> = (0..nf)
        .map(|f| face_data(complex, angles, r, geometry, f))
        .collect::<Result<_, _>>()?;

    let mut positions: Vec<Option<[C; 3]>> = vec![None; nf];
    let mut tree_edge = vec![false; complex.num_edges()];
    let mut queue = VecDeque::new();

    // Root face.
    {
        let p0 = C::new(0.0, 0.0);
        let p1 = C::new(reach(geometry, data[0].lengths[0]), 0.0);
        let p2 = place_third(geometry, &data[0], 0, p0, p1, 0)?;
        positions[0] = Some([p0, p1, p2]);
        queue.push_back(0usize);
    }

    while let Some(f) = queue.pop_front() {
        let pos = positions[f].expect("queued faces are placed");
        for s in 0..3 {
            let edge = complex.faces()[f][s].edge;
            let [a, b] = complex.edge_sides(edge);
            let other = if (a.face, a.side) == (f, s) { b } else { a };
            if positions[other.face].is_some() {
                continue;
            }
            if complex.faces()[f][s].forward == complex.faces()[other.face][other.side].forward {
                return Err(LayoutError::OrientationBroken { edge });
            }
            // The neighbor traverses the edge in the opposite direction.
            let tail_pos = pos[(s + 1) % 3];
            let head_pos = pos[s];
            let g = other.face;
            let sg = other.side;
            let third = place_third(geometry, &data[g], sg, tail_pos, head_pos, g)?;
            let mut gp = [C::new(0.0, 0.0); 3];
            gp[sg] = tail_pos;
            gp[(sg + 1) % 3] = head_pos;
            gp[(sg + 2) % 3] = third;
            positions[g] = Some(gp);
            tree_edge[edge] = true;
            queue.push_back(g);
        }
    }

    let unplaced = positions.iter().filter(|p| p.is_none()).count();
    if unplaced > 0 {
        return Err(LayoutError::Disconnected { unplaced });
    }

    for f in 0..nf {
        let pos = positions[f].expect("all faces placed");
        if geometry == BackgroundGeometry::Hyperbolic {
            for p in &pos {
                if p.norm() >= 1.0 {
                    return Err(LayoutError::OutsideDisk { face: f });
                }
            }
        }
        // Interstice point: rotate off side 0 at the tail corner by the
        // two-circle angle, at metric distance r(w0).
        let w0 = data[f].vertices[0];
        let w1 = data[f].vertices[1];
        let theta_e = angles.theta()[complex.faces()[f][0].edge];
        let vartheta = center_angle(r.values()[w0], r.values()[w1], theta_e, geometry)?;
        let interstice = place(geometry, pos[0], pos[1], vartheta, r.values()[w0]);

        let mut side_kinds = [SideKind::Seam; 3];
        for s in 0..3 {
            if tree_edge[complex.faces()[f][s].edge] {
                side_kinds[s] = SideKind::Tree;
            }
        }
        layout.faces.push(PlacedFace {
            face: f,
            vertices: data[f].vertices,
            corners: [
                ChartPoint::from_c(pos[0]),
                ChartPoint::from_c(pos[1]),
                ChartPoint::from_c(pos[2]),
            ],
            interstice: ChartPoint::from_c(interstice),
            side_kinds,
        });
    }
    Ok(layout)
}

/// Result of developing the full star of faces around one vertex placement.
/// `closure_defect` is the angle by which the first and last edge directions
/// fail to agree: `Σ corner angles − 2π`, i.e. `−K` at the vertex.
#[derive(Clone, Copy, Debug)]
pub struct StarDevelopment {
    pub corner_count: usize,
    pub total_angle: f64,
    pub closure_defect: f64,
}

/// Walk the rotation system around `v`, placing each corner wedge against
/// the previous one, and report whether the star closes up.
pub fn develop_star(
    complex: &SurfaceComplex,
    angles: &AngleAssignment,
    r: &RadiusVector,
    geometry: BackgroundGeometry,
    v: usize,
) -> Result<StarDevelopment, LayoutError> {
    if r.len() != complex.num_vertices() {
        return Err(GeometryError::SizeMismatch {
            what: "radius vector length",
            got: r.len(),
            expected: complex.num_vertices(),
        }
        .into());
    }
    // First corner at v in scan order.
    let mut start = None;
    'outer: for f in 0..complex.num_faces() {
        for c in 0..3 {
            if complex.corner(f, c).vertex == v {
                start = Some((f, c));
                break 'outer;
            }
        }
    }
    let Some(start) = start else {
        return Err(LayoutError::NoCorners { vertex: v });
    };

    let max_corners = complex.incident_edge_ends(v).len();
    let mut total_angle = 0.0;
    let mut corner_count = 0usize;
    let mut current = start;
    loop {
        let (f, c) = current;
        let data = face_data(complex, angles, r, geometry, f)?;
        // Corner c sits at walk vertex w[c+1], between sides c and c+1.
        total_angle += corner_angle_from_lengths(
            geometry,
            data.lengths[c],
            data.lengths[(c + 1) % 3],
            data.lengths[(c + 2) % 3],
            f,
        )?;
        corner_count += 1;
        if corner_count > max_corners {
            return Err(LayoutError::StarWalkBroken { vertex: v });
        }
        // Cross the outgoing side into the neighboring face.
        let out = complex.faces()[f][(c + 1) % 3];
        let Some(next) = complex.side_owner(out.edge, !out.forward) else {
            return Err(LayoutError::OrientationBroken { edge: out.edge });
        };
        current = (next.face, next.side);
        if current == start {
            break;
        }
    }
    Ok(StarDevelopment {
        corner_count,
        total_angle,
        closure_defect: total_angle - 2.0 * std::f64::consts::PI,
    })
}
