//! Parsers for the small text formats the command-line front end accepts:
//! target curvature files and radii sources. Mesh documents live in
//! [`crate::complex`]. All parsers here must return clean errors on
//! arbitrary input, never panic; they are fuzzed.

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("expected a JSON array of numbers")]
    NotNumberArray,
    #[error("entry {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("expected a JSON array of radii or a solve report with a final_r field")]
    NotRadiiDocument,
}

fn finite_array(value: &serde_json::Value) -> Result<Vec<f64>, IoError> {
    let arr = value.as_array().ok_or(IoError::NotNumberArray)?;
    let mut out = Vec::with_capacity(arr.len());
    for (index, v) in arr.iter().enumerate() {
        let x = v.as_f64().ok_or(IoError::NonFinite { index })?;
        if !x.is_finite() {
            return Err(IoError::NonFinite { index });
        }
        out.push(x);
    }
    Ok(out)
}

/// Parse a target curvature file: a JSON array of finite numbers (radians).
pub fn parse_target_values(text: &str) -> Result<Vec<f64>, IoError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    finite_array(&value)
}

/// Parse a radii source: either a bare JSON array of radii, or a solve
/// report object carrying a `final_r` array.
pub fn parse_radii_document(text: &str) -> Result<Vec<f64>, IoError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    match &value {
        serde_json::Value::Array(_) => finite_array(&value),
        serde_json::Value::Object(map) => {
            let final_r = map.get("final_r").ok_or(IoError::NotRadiiDocument)?;
            finite_array(final_r)
        }
        _ => Err(IoError::NotRadiiDocument),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_arrays_parse() {
        assert_eq!(parse_target_values("[0.0, 1.5]").unwrap(), vec![0.0, 1.5]);
        assert!(matches!(
            parse_target_values("{\"a\": 1}"),
            Err(IoError::NotNumberArray)
        ));
        assert!(matches!(
            parse_target_values("[1, \"x\"]"),
            Err(IoError::NonFinite { index: 1 })
        ));
        assert!(parse_target_values("not json").is_err());
    }

    #[test]
    fn radii_sources_parse() {
        assert_eq!(parse_radii_document("[1.0, 2.0]").unwrap(), vec![1.0, 2.0]);
        let report = r#"{"converged": true, "final_r": [0.5, 0.7], "steps": 12}"#;
        assert_eq!(parse_radii_document(report).unwrap(), vec![0.5, 0.7]);
        assert!(matches!(
            parse_radii_document(r#"{"converged": true}"#),
            Err(IoError::NotRadiiDocument)
        ));
        assert!(matches!(
            parse_radii_document("42"),
            Err(IoError::NotRadiiDocument)
        ));
    }
}
