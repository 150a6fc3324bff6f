//! Shared helpers for the integration suites.

use rand::Rng;

use calaflow_core::complex::{AngleAssignment, MeshDocument, SurfaceComplex};
use calaflow_core::geometry::RadiusVector;

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

/// Log-uniform radii in [0.1, 10], matching the CLI's seeded initialization.
pub fn seeded_radii<R: Rng>(rng: &mut R, n: usize) -> RadiusVector {
    let r = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-1.0..1.0)))
        .collect();
    RadiusVector::new(r).expect("log-uniform radii are positive")
}

/// Print one pass/fail line per criterion and panic on failure.
pub fn report(criterion: &str, description: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("{criterion}: PASS - {description}");
    } else {
        println!("{criterion}: FAIL - {description}");
        for f in failures {
            println!("  - {f}");
        }
        panic!("{criterion} failed with {} issue(s)", failures.len());
    }
}
