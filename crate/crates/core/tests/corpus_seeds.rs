//! Run every checked-in fuzz corpus seed through its parser, mirroring the
//! fuzz targets' assertions. Keeps the parser contracts covered in plain
//! `cargo test` runs, with or without a fuzzing toolchain.

use calaflow_core::complex::{MeshDocument, SurfaceComplex};
use calaflow_core::geometry::BackgroundGeometry;
use calaflow_core::io::{parse_radii_document, parse_target_values};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = format!("{}/../../fuzz/corpus/{target}", env!("CARGO_MANIFEST_DIR"));
    let mut entries: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("corpus dir {dir}: {e}"))
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            (
                p.display().to_string(),
                std::fs::read_to_string(&p).expect("seed is text"),
            )
        })
        .collect()
}

#[test]
fn mesh_document_seeds() {
    let seeds = seeds("mesh_document");
    assert!(!seeds.is_empty());
    let mut loaded = 0;
    for (path, text) in seeds {
        let Ok(doc) = MeshDocument::parse(&text) else {
            continue;
        };
        let Ok(complex) = SurfaceComplex::from_document(&doc) else {
            continue;
        };
        loaded += 1;
        for geometry in [
            BackgroundGeometry::Hyperbolic,
            BackgroundGeometry::Euclidean,
        ] {
            let report = complex.validate(geometry);
            assert_eq!(report.ok, report.violations.is_empty(), "{path}");
        }
        let angles = doc.angles().unwrap_or(None);
        let rewritten = complex
            .to_document(angles.as_ref(), doc.name.as_deref())
            .to_json_string();
        let reloaded =
            SurfaceComplex::from_document(&MeshDocument::parse(&rewritten).unwrap()).unwrap();
        assert_eq!(complex, reloaded, "{path} must round-trip");
    }
    assert!(loaded >= 3, "the fixture seeds load");
}

#[test]
fn target_spec_seeds() {
    for (path, text) in seeds("target_spec") {
        if let Ok(values) = parse_target_values(&text) {
            assert!(values.iter().all(|v| v.is_finite()), "{path}");
        }
    }
}

#[test]
fn radii_source_seeds() {
    for (path, text) in seeds("radii_source") {
        if let Ok(values) = parse_radii_document(&text) {
            assert!(values.iter().all(|v| v.is_finite()), "{path}");
        }
    }
}
