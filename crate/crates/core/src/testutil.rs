//! Helpers shared by the unit test modules.

use rand::Rng;

use crate::complex::{AngleAssignment, MeshDocument, SurfaceComplex};
use crate::geometry::RadiusVector;

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path}: {e}"))
}

pub fn load_fixture(name: &str) -> (SurfaceComplex, AngleAssignment) {
    let doc = MeshDocument::parse(&fixture_text(name)).expect("fixture parses");
    let complex = SurfaceComplex::from_document(&doc).expect("fixture is well-formed");
    let angles = doc
        .angles()
        .expect("fixture theta is valid")
        .expect("fixture carries theta");
    (complex, angles)
}

/// Log-uniform radii in [0.1, 10], the same distribution the CLI seeds with.
pub fn seeded_radii<R: Rng>(rng: &mut R, n: usize) -> RadiusVector {
    let r = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-1.0..1.0)))
        .collect();
    RadiusVector::new(r).expect("log-uniform radii are positive")
}
