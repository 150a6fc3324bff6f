//! Δ-complex triangulations of closed oriented surfaces.
//!
//! Faces reference *directed edges* rather than vertex triples: the minimal
//! triangulations this crate cares about (the one-vertex torus, the two-vertex
//! genus-2 octagon cone) contain self-loop edges and multi-edges, for which
//! vertex triples are ambiguous. A face is a cyclic chain of three edge sides;
//! a self-loop contributes both of its ends to the incidence of its vertex.

use serde::{Deserialize, Serialize};

use crate::geometry::BackgroundGeometry;

/// Default tolerance on the per-face angle sum Σ Θ(eᵢ) − π.
pub const C1_TOL: f64 = 1e-12;

/// Errors from parsing mesh documents and constructing complexes.
#[derive(Debug, thiserror::Error)]
pub enum ComplexError {
    #[error("malformed mesh document: {0}")]
    Parse(String),
    #[error("edge {edge} references vertex {vertex}, but the complex has {num_vertices} vertices")]
    VertexIndex {
        edge: usize,
        vertex: i64,
        num_vertices: usize,
    },
    #[error(
        "face {face} side {side} references edge {edge}, but the complex has {num_edges} edges"
    )]
    EdgeIndex {
        face: usize,
        side: usize,
        edge: i64,
        num_edges: usize,
    },
    #[error("face {face} side {side} has direction {dir}; expected +1 or -1")]
    Direction { face: usize, side: usize, dir: i64 },
    #[error("face {face} does not chain head-to-tail at side {side}")]
    FaceNotChained { face: usize, side: usize },
    #[error("edge {edge} is used by {count} face sides; every edge of a closed surface is used exactly twice")]
    EdgeUsage { edge: usize, count: usize },
    #[error("vertex count {num_vertices} is implausible for {num_edges} edges")]
    VertexCountBound {
        num_vertices: usize,
        num_edges: usize,
    },
    #[error("theta[{edge}] = {value} is outside the open interval (0, pi)")]
    ThetaOutOfRange { edge: usize, value: f64 },
    #[error("theta has {got} entries for {expected} edges")]
    ThetaLength { got: usize, expected: usize },
}

/// Which end of an edge an incidence refers to. Self-loops own both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEnd {
    Tail,
    Head,
}

/// One end of one edge, as stored in the per-vertex incidence cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndRef {
    pub edge: usize,
    pub end: EdgeEnd,
}

/// A directed reference to an edge inside a face boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSide {
    pub edge: usize,
    pub forward: bool,
}

/// A face corner: the vertex between two consecutive sides of a face walk,
/// together with the two flanking edge ends meeting there.
#[derive(Clone, Copy, Debug)]
pub struct Corner {
    pub vertex: usize,
    pub in_end: EndRef,
    pub out_end: EndRef,
}

/// One of the two face sides using a given edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideRef {
    pub face: usize,
    pub side: usize,
    pub forward: bool,
}

/// A Δ-complex triangulation `(V, E, F)` with incidence caches.
///
/// Construction enforces that all indices are in range, that every face
/// chains head-to-tail, and that every edge is used by exactly two face
/// sides (otherwise the incidence caches would be ill-formed). Orientation
/// consistency and connectivity are *reported* by [`SurfaceComplex::validate`]
/// rather than enforced, so broken inputs can be diagnosed.
#[derive(Clone, Debug)]
pub struct SurfaceComplex {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<[FaceSide; 3]>,
    /// Per vertex: every incident edge end, edges in index order.
    vertex_ends: Vec<Vec<EndRef>>,
    /// Per edge: the two face sides using it, in (face, side) order.
    edge_sides: Vec<[SideRef; 2]>,
}

impl PartialEq for SurfaceComplex {
    fn eq(&self, other: &Self) -> bool {
        self.num_vertices == other.num_vertices
            && self.edges == other.edges
            && self.faces == other.faces
    }
}

impl SurfaceComplex {
    pub fn new(
        num_vertices: usize,
        edges: Vec<[usize; 2]>,
        faces: Vec<[FaceSide; 3]>,
    ) -> Result<Self, ComplexError> {
        // Any closed surface satisfies N <= 2E; the slack keeps malformed
        // complexes with stray vertices constructible for diagnostics while
        // bounding allocations against hostile documents.
        if num_vertices > 2 * edges.len() + 1 {
            return Err(ComplexError::VertexCountBound {
                num_vertices,
                num_edges: edges.len(),
            });
        }
        for (e, &[t, h]) in edges.iter().enumerate() {
            for v in [t, h] {
                if v >= num_vertices {
                    return Err(ComplexError::VertexIndex {
                        edge: e,
                        vertex: v as i64,
                        num_vertices,
                    });
                }
            }
        }
        let mut usage = vec![Vec::new(); edges.len()];
        for (f, sides) in faces.iter().enumerate() {
            for (s, side) in sides.iter().enumerate() {
                if side.edge >= edges.len() {
                    return Err(ComplexError::EdgeIndex {
                        face: f,
                        side: s,
                        edge: side.edge as i64,
                        num_edges: edges.len(),
                    });
                }
                usage[side.edge].push(SideRef {
                    face: f,
                    side: s,
                    forward: side.forward,
                });
            }
            for s in 0..3 {
                let head = directed_endpoints(&edges, sides[s]).1;
                let tail = directed_endpoints(&edges, sides[(s + 1) % 3]).0;
                if head != tail {
                    return Err(ComplexError::FaceNotChained { face: f, side: s });
                }
            }
        }
        let mut edge_sides = Vec::with_capacity(edges.len());
        for (e, u) in usage.into_iter().enumerate() {
            match <[SideRef; 2]>::try_from(u.as_slice()) {
                Ok(pair) => edge_sides.push(pair),
                Err(_) => {
                    return Err(ComplexError::EdgeUsage {
                        edge: e,
                        count: u.len(),
                    })
                }
            }
        }
        let mut vertex_ends = vec![Vec::new(); num_vertices];
        for (e, &[t, h]) in edges.iter().enumerate() {
            vertex_ends[t].push(EndRef {
                edge: e,
                end: EdgeEnd::Tail,
            });
            vertex_ends[h].push(EndRef {
                edge: e,
                end: EdgeEnd::Head,
            });
        }
        Ok(Self {
            num_vertices,
            edges,
            faces,
            vertex_ends,
            edge_sides,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[FaceSide; 3]] {
        &self.faces
    }

    /// χ = N − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Directed endpoints (tail, head) of a face side.
    pub fn side_endpoints(&self, side: FaceSide) -> (usize, usize) {
        directed_endpoints(&self.edges, side)
    }

    /// Every edge end incident to `v`, as a multiset: a self-loop at `v`
    /// appears twice, once per end.
    pub fn incident_edge_ends(&self, v: usize) -> &[EndRef] {
        &self.vertex_ends[v]
    }

    /// The two face sides using edge `e`.
    pub fn edge_sides(&self, e: usize) -> [SideRef; 2] {
        self.edge_sides[e]
    }

    /// The face side traversing edge `e` in the given direction, if the
    /// traversal is unique (it is on a consistently oriented complex).
    pub fn side_owner(&self, e: usize, forward: bool) -> Option<SideRef> {
        let [a, b] = self.edge_sides[e];
        match (a.forward == forward, b.forward == forward) {
            (true, false) => Some(a),
            (false, true) => Some(b),
            _ => None,
        }
    }

    /// Corner `c` of face `f`: the vertex at the head of side `c`, flanked by
    /// side `c` (incoming) and side `c + 1` (outgoing).
    pub fn corner(&self, f: usize, c: usize) -> Corner {
        let sides = &self.faces[f];
        let in_side = sides[c];
        let out_side = sides[(c + 1) % 3];
        let vertex = self.side_endpoints(in_side).1;
        let in_end = EndRef {
            edge: in_side.edge,
            end: if in_side.forward {
                EdgeEnd::Head
            } else {
                EdgeEnd::Tail
            },
        };
        let out_end = EndRef {
            edge: out_side.edge,
            end: if out_side.forward {
                EdgeEnd::Tail
            } else {
                EdgeEnd::Head
            },
        };
        Corner {
            vertex,
            in_end,
            out_end,
        }
    }

    /// The vertex sitting at the far side of an edge end.
    pub fn opposite_vertex(&self, end: EndRef) -> usize {
        let [t, h] = self.edges[end.edge];
        match end.end {
            EdgeEnd::Tail => h,
            EdgeEnd::Head => t,
        }
    }

    /// The vertex an edge end is anchored at.
    pub fn end_vertex(&self, end: EndRef) -> usize {
        let [t, h] = self.edges[end.edge];
        match end.end {
            EdgeEnd::Tail => t,
            EdgeEnd::Head => h,
        }
    }

    /// Structural report: closedness, orientation, connectivity, face
    /// chaining, and the Euler characteristic constraint of the requested
    /// background geometry (χ < 0 hyperbolic, χ = 0 Euclidean).
    pub fn validate(&self, geometry: BackgroundGeometry) -> ValidationReport {
        let mut violations = Vec::new();
        if self.num_vertices == 0 || self.faces.is_empty() {
            violations.push("complex is empty (no vertices or no faces)".to_string());
        }
        // Closedness and chaining hold by construction; re-derive them anyway
        // so the report stands on its own.
        let mut usage = vec![0usize; self.edges.len()];
        for sides in &self.faces {
            for side in sides {
                usage[side.edge] += 1;
            }
        }
        for (e, &count) in usage.iter().enumerate() {
            if count != 2 {
                violations.push(format!(
                    "edge {e} is used by {count} face sides, expected 2"
                ));
            }
        }
        for (f, sides) in self.faces.iter().enumerate() {
            for s in 0..3 {
                if self.side_endpoints(sides[s]).1 != self.side_endpoints(sides[(s + 1) % 3]).0 {
                    violations.push(format!("face {f} does not chain at side {s}"));
                }
            }
        }
        for (e, [a, b]) in self.edge_sides.iter().enumerate() {
            if a.forward == b.forward {
                violations.push(format!(
                    "edge {e} is traversed twice in the same direction (faces {} and {}); orientation is inconsistent",
                    a.face, b.face
                ));
            }
        }
        if !self.is_connected() {
            violations.push("complex is not connected".to_string());
        }
        let chi = self.euler_characteristic();
        match geometry {
            BackgroundGeometry::Hyperbolic => {
                if chi >= 0 {
                    violations.push(format!(
                        "hyperbolic background geometry needs χ < 0, got χ = {chi}"
                    ));
                }
            }
            BackgroundGeometry::Euclidean => {
                if chi != 0 {
                    violations.push(format!(
                        "euclidean background geometry needs χ = 0, got χ = {chi}"
                    ));
                }
            }
        }
        ValidationReport {
            ok: violations.is_empty(),
            euler_characteristic: chi,
            violations,
        }
    }

    fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return false;
        }
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for end in &self.vertex_ends[v] {
                let w = self.opposite_vertex(*end);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Per-face deviations Σᵢ Θ(eᵢ) − π. Condition (C1) holds when every
    /// deviation is below tolerance ([`C1_TOL`] by default).
    pub fn check_c1(&self, angles: &AngleAssignment) -> Result<Vec<f64>, ComplexError> {
        angles.check_len(self.edges.len())?;
        Ok(self
            .faces
            .iter()
            .map(|sides| {
                sides.iter().map(|s| angles.theta()[s.edge]).sum::<f64>() - std::f64::consts::PI
            })
            .collect())
    }

    /// True when every face angle sum deviates from π by at most `tol`.
    pub fn c1_satisfied(&self, angles: &AngleAssignment, tol: f64) -> Result<bool, ComplexError> {
        Ok(self.check_c1(angles)?.iter().all(|d| d.abs() <= tol))
    }

    pub fn from_document(doc: &MeshDocument) -> Result<Self, ComplexError> {
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (e, &[t, h]) in doc.edges.iter().enumerate() {
            for v in [t, h] {
                if v < 0 || v as u64 >= doc.num_vertices as u64 {
                    return Err(ComplexError::VertexIndex {
                        edge: e,
                        vertex: v,
                        num_vertices: doc.num_vertices,
                    });
                }
            }
            edges.push([t as usize, h as usize]);
        }
        let mut faces = Vec::with_capacity(doc.faces.len());
        for (f, sides) in doc.faces.iter().enumerate() {
            let mut face = [FaceSide {
                edge: 0,
                forward: true,
            }; 3];
            for (s, &[e, dir]) in sides.iter().enumerate() {
                if e < 0 || e as u64 >= doc.edges.len() as u64 {
                    return Err(ComplexError::EdgeIndex {
                        face: f,
                        side: s,
                        edge: e,
                        num_edges: doc.edges.len(),
                    });
                }
                let forward = match dir {
                    1 => true,
                    -1 => false,
                    _ => {
                        return Err(ComplexError::Direction {
                            face: f,
                            side: s,
                            dir,
                        })
                    }
                };
                face[s] = FaceSide {
                    edge: e as usize,
                    forward,
                };
            }
            faces.push(face);
        }
        Self::new(doc.num_vertices, edges, faces)
    }

    /// Serialize back to the document form, optionally attaching an angle
    /// assignment and a name. Re-loading the result yields an equal complex.
    pub fn to_document(
        &self,
        angles: Option<&AngleAssignment>,
        name: Option<&str>,
    ) -> MeshDocument {
        MeshDocument {
            name: name.map(|s| s.to_string()),
            num_vertices: self.num_vertices,
            edges: self
                .edges
                .iter()
                .map(|&[t, h]| [t as i64, h as i64])
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|sides| {
                    [
                        [sides[0].edge as i64, if sides[0].forward { 1 } else { -1 }],
                        [sides[1].edge as i64, if sides[1].forward { 1 } else { -1 }],
                        [sides[2].edge as i64, if sides[2].forward { 1 } else { -1 }],
                    ]
                })
                .collect(),
            theta: angles.map(|a| a.theta().to_vec()),
        }
    }
}

fn directed_endpoints(edges: &[[usize; 2]], side: FaceSide) -> (usize, usize) {
    let [t, h] = edges[side.edge];
    if side.forward {
        (t, h)
    } else {
        (h, t)
    }
}

/// Exterior intersection angles, one per edge, each in the open interval (0, π).
#[derive(Clone, Debug, PartialEq)]
pub struct AngleAssignment {
    theta: Vec<f64>,
}

impl AngleAssignment {
    pub fn new(theta: Vec<f64>) -> Result<Self, ComplexError> {
        for (e, &t) in theta.iter().enumerate() {
            if !(t.is_finite() && t > 0.0 && t < std::f64::consts::PI) {
                return Err(ComplexError::ThetaOutOfRange { edge: e, value: t });
            }
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    fn check_len(&self, expected: usize) -> Result<(), ComplexError> {
        if self.theta.len() != expected {
            return Err(ComplexError::ThetaLength {
                got: self.theta.len(),
                expected,
            });
        }
        Ok(())
    }
}

/// Outcome of [`SurfaceComplex::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub euler_characteristic: i64,
    pub violations: Vec<String>,
}

/// The on-disk mesh format: a JSON object with `num_vertices`, `edges`
/// as `[tail, head]` pairs, `faces` as three `[edge_index, direction]`
/// references with direction ±1, and optional `theta` / `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    pub num_vertices: usize,
    pub edges: Vec<[i64; 2]>,
    pub faces: Vec<[[i64; 2]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<Vec<f64>>,
}

impl MeshDocument {
    pub fn parse(text: &str) -> Result<Self, ComplexError> {
        serde_json::from_str(text).map_err(|e| ComplexError::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        // Infallible: the document is a tree of plain values.
        serde_json::to_string_pretty(self).expect("mesh document serialization")
    }

    /// The angle assignment carried by the document, if any.
    pub fn angles(&self) -> Result<Option<AngleAssignment>, ComplexError> {
        match &self.theta {
            None => Ok(None),
            Some(t) => {
                if t.len() != self.edges.len() {
                    return Err(ComplexError::ThetaLength {
                        got: t.len(),
                        expected: self.edges.len(),
                    });
                }
                AngleAssignment::new(t.clone()).map(Some)
            }
        }
    }
}

/// Parse a mesh document and build the complex it describes.
pub fn load_complex(text: &str) -> Result<SurfaceComplex, ComplexError> {
    SurfaceComplex::from_document(&MeshDocument::parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::testutil::{fixture_text as fixture, load_fixture as load};

    #[test]
    fn torus1_loads_with_expected_counts() {
        let (c, _) = load("torus1.json");
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.num_edges(), 3);
        assert_eq!(c.num_faces(), 2);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(2 * c.num_edges(), 3 * c.num_faces());
    }

    #[test]
    fn genus2_loads_with_expected_counts() {
        let (c, _) = load("genus2.json");
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.num_edges(), 12);
        assert_eq!(c.num_faces(), 8);
        assert_eq!(c.euler_characteristic(), -2);
        assert_eq!(2 * c.num_edges(), 3 * c.num_faces());
    }

    #[test]
    fn torus2_loads_with_expected_counts() {
        let (c, _) = load("torus2.json");
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.num_edges(), 6);
        assert_eq!(c.num_faces(), 4);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn validate_matches_geometry_constraints() {
        let (torus, _) = load("torus1.json");
        let report = torus.validate(BackgroundGeometry::Euclidean);
        assert!(report.ok, "violations: {:?}", report.violations);
        assert_eq!(report.euler_characteristic, 0);

        let report = torus.validate(BackgroundGeometry::Hyperbolic);
        assert!(!report.ok);
        assert!(report.violations.iter().any(|v| v.contains("χ < 0")));

        let (genus2, _) = load("genus2.json");
        let report = genus2.validate(BackgroundGeometry::Hyperbolic);
        assert!(report.ok, "violations: {:?}", report.violations);
        assert_eq!(report.euler_characteristic, -2);
        assert!(!genus2.validate(BackgroundGeometry::Euclidean).ok);
    }

    #[test]
    fn incident_ends_count_self_loops_twice() {
        let (torus, _) = load("torus1.json");
        assert_eq!(torus.incident_edge_ends(0).len(), 6);

        let (genus2, _) = load("genus2.json");
        assert_eq!(
            genus2.incident_edge_ends(0).len(),
            8,
            "center has 8 spoke ends"
        );
        assert_eq!(
            genus2.incident_edge_ends(1).len(),
            16,
            "rim: 8 spoke heads + 4 loops"
        );
    }

    #[test]
    fn isolated_vertex_has_empty_incidence_and_fails_validation() {
        let doc = MeshDocument {
            name: None,
            num_vertices: 2,
            edges: vec![[0, 0], [0, 0], [0, 0]],
            faces: vec![[[0, 1], [1, 1], [2, -1]], [[2, 1], [0, -1], [1, -1]]],
            theta: None,
        };
        let c = SurfaceComplex::from_document(&doc).unwrap();
        assert!(c.incident_edge_ends(1).is_empty());
        let report = c.validate(BackgroundGeometry::Euclidean);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("not connected")));
    }

    #[test]
    fn edge_used_three_times_is_a_load_error() {
        let text = r#"{
            "num_vertices": 1,
            "edges": [[0,0],[0,0],[0,0]],
            "faces": [
                [[0,1],[1,1],[2,-1]],
                [[2,1],[0,-1],[1,-1]],
                [[0,1],[1,1],[2,-1]]
            ]
        }"#;
        match load_complex(text) {
            Err(ComplexError::EdgeUsage { .. }) => {}
            other => panic!("expected EdgeUsage error, got {other:?}"),
        }
    }

    #[test]
    fn bad_indices_and_directions_are_load_errors() {
        let unchained = r#"{
            "num_vertices": 2,
            "edges": [[0,1],[0,1],[0,1]],
            "faces": [[[0,1],[1,1],[2,-1]],[[2,1],[0,-1],[1,-1]]]
        }"#;
        assert!(matches!(
            load_complex(unchained),
            Err(ComplexError::FaceNotChained { .. })
        ));

        let bad_edge = r#"{"num_vertices":1,"edges":[[0,0]],"faces":[[[5,1],[0,1],[0,-1]]]}"#;
        assert!(matches!(
            load_complex(bad_edge),
            Err(ComplexError::EdgeIndex { .. })
        ));

        let bad_vertex = r#"{"num_vertices":1,"edges":[[0,3]],"faces":[]}"#;
        assert!(matches!(
            load_complex(bad_vertex),
            Err(ComplexError::VertexIndex { .. })
        ));

        let bad_dir = r#"{
            "num_vertices": 1,
            "edges": [[0,0],[0,0],[0,0]],
            "faces": [[[0,0],[1,1],[2,-1]],[[2,1],[0,-1],[1,-1]]]
        }"#;
        assert!(matches!(
            load_complex(bad_dir),
            Err(ComplexError::Direction { .. })
        ));

        assert!(matches!(
            load_complex("not json at all"),
            Err(ComplexError::Parse(_))
        ));
    }

    #[test]
    fn c1_deviations_on_fixtures() {
        let (torus, angles) = load("torus1.json");
        for d in torus.check_c1(&angles).unwrap() {
            assert!(d.abs() <= 1e-15, "torus deviation {d}");
        }
        assert!(torus.c1_satisfied(&angles, C1_TOL).unwrap());

        let (genus2, angles) = load("genus2.json");
        for d in genus2.check_c1(&angles).unwrap() {
            assert_eq!(d, 0.0, "π/4 + π/4 + π/2 recombines to π exactly");
        }

        let (torus2, angles) = load("torus2.json");
        for d in torus2.check_c1(&angles).unwrap() {
            assert!(d.abs() <= 1e-15, "torus2 deviation {d}");
        }
    }

    #[test]
    fn c1_deviation_reports_excess() {
        let (torus, _) = load("torus1.json");
        let right_angles = AngleAssignment::new(vec![std::f64::consts::FRAC_PI_2; 3]).unwrap();
        for d in torus.check_c1(&right_angles).unwrap() {
            assert!((d - std::f64::consts::FRAC_PI_2).abs() <= 1e-15);
        }
    }

    #[test]
    fn theta_validation() {
        assert!(AngleAssignment::new(vec![0.5, 3.0]).is_ok());
        assert!(matches!(
            AngleAssignment::new(vec![0.0]),
            Err(ComplexError::ThetaOutOfRange { .. })
        ));
        assert!(matches!(
            AngleAssignment::new(vec![std::f64::consts::PI]),
            Err(ComplexError::ThetaOutOfRange { .. })
        ));
        assert!(matches!(
            AngleAssignment::new(vec![-0.1]),
            Err(ComplexError::ThetaOutOfRange { .. })
        ));

        let (torus, _) = load("torus1.json");
        let short = AngleAssignment::new(vec![1.0]).unwrap();
        assert!(matches!(
            torus.check_c1(&short),
            Err(ComplexError::ThetaLength { .. })
        ));
    }

    #[test]
    fn document_round_trip_is_identity() {
        for name in ["torus1.json", "genus2.json", "torus2.json"] {
            let doc = MeshDocument::parse(&fixture(name)).unwrap();
            let complex = SurfaceComplex::from_document(&doc).unwrap();
            let angles = doc.angles().unwrap();
            let rewritten = complex
                .to_document(angles.as_ref(), doc.name.as_deref())
                .to_json_string();
            let reloaded_doc = MeshDocument::parse(&rewritten).unwrap();
            let reloaded = SurfaceComplex::from_document(&reloaded_doc).unwrap();
            assert_eq!(complex, reloaded, "{name} round trip");
            assert_eq!(doc, reloaded_doc, "{name} document round trip");
        }
    }

    #[test]
    fn side_owner_finds_unique_traversals() {
        let (torus, _) = load("torus1.json");
        for e in 0..torus.num_edges() {
            let fwd = torus.side_owner(e, true).unwrap();
            let bwd = torus.side_owner(e, false).unwrap();
            assert_ne!((fwd.face, fwd.side), (bwd.face, bwd.side));
        }
    }

    #[test]
    fn corners_have_consistent_flanks() {
        let (genus2, _) = load("genus2.json");
        for f in 0..genus2.num_faces() {
            for c in 0..3 {
                let corner = genus2.corner(f, c);
                assert_eq!(genus2.end_vertex(corner.in_end), corner.vertex);
                assert_eq!(genus2.end_vertex(corner.out_end), corner.vertex);
            }
        }
    }

    #[test]
    fn hostile_vertex_count_is_rejected() {
        let text = r#"{"num_vertices": 99999999999, "edges": [[0,0]], "faces": []}"#;
        assert!(matches!(
            load_complex(text),
            Err(ComplexError::VertexCountBound { .. })
        ));
    }
}
