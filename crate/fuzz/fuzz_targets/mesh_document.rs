//! Fuzz the mesh document parser and complex construction.
//!
//! Expectation: arbitrary bytes either fail with a clean error or produce a
//! complex whose re-serialization round-trips to an equal complex, with
//! validation running panic-free.

#![no_main]

use calaflow_core::complex::{MeshDocument, SurfaceComplex};
use calaflow_core::geometry::BackgroundGeometry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = MeshDocument::parse(text) else {
        return;
    };
    let Ok(complex) = SurfaceComplex::from_document(&doc) else {
        return;
    };

    for geometry in [
        BackgroundGeometry::Hyperbolic,
        BackgroundGeometry::Euclidean,
    ] {
        let report = complex.validate(geometry);
        assert_eq!(report.ok, report.violations.is_empty());
    }
    for v in 0..complex.num_vertices() {
        let _ = complex.incident_edge_ends(v);
    }

    let angles = doc.angles().unwrap_or(None);
    let rewritten = complex
        .to_document(angles.as_ref(), doc.name.as_deref())
        .to_json_string();
    let doc2 = MeshDocument::parse(&rewritten).expect("serializer output parses");
    let complex2 = SurfaceComplex::from_document(&doc2).expect("serializer output loads");
    assert_eq!(complex, complex2, "load/serialize/load must be identity");
});
