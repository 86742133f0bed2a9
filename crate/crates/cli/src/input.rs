//! Loading groups and group algebra elements from command-line arguments.

use std::path::Path;
use std::sync::Arc;

use gdft::group::GroupSpec;
use gdft::{FiniteGroup, GdftError, GroupAlgebraElement, Result};
use num_complex::Complex64;
use serde::Deserialize;

/// `name:n[*name:n...]` or a path to a JSON group spec.
pub fn load_group(arg: &str) -> Result<Arc<FiniteGroup>> {
    let spec = GroupSpec::parse_arg(arg).map_err(|e| e.context(format!("group `{arg}`")))?;
    Ok(Arc::new(spec.build()?))
}

/// `random:SEED`, or a CSV or JSON file with one coefficient per element.
pub fn load_alpha(arg: &str, g: &Arc<FiniteGroup>) -> Result<GroupAlgebraElement> {
    if let Some(seed) = arg.strip_prefix("random:") {
        let seed = seed
            .parse()
            .map_err(|_| GdftError::Parse(format!("bad seed {seed:?}")))?;
        return Ok(GroupAlgebraElement::random(g, seed));
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| GdftError::from(e).context(format!("reading {arg}")))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with(['[', '{']);
    let coeffs = if is_json { parse_json(&text) } else { parse_csv(&text) }
        .map_err(|e| e.context(format!("coefficients in {arg}")))?;
    Ok(GroupAlgebraElement::new(g, coeffs)?.with_support())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCoeff {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonAlpha {
    List(Vec<JsonCoeff>),
    Object { coeffs: Vec<JsonCoeff> },
}

/// A list of numbers or `[re, im]` pairs, bare or under `"coeffs"`.
fn parse_json(text: &str) -> Result<Vec<Complex64>> {
    let parsed: JsonAlpha = serde_json::from_str(text).map_err(|e| GdftError::Parse(e.to_string()))?;
    let (JsonAlpha::List(v) | JsonAlpha::Object { coeffs: v }) = parsed;
    Ok(v.into_iter()
        .map(|c| match c {
            JsonCoeff::Real(re) => Complex64::new(re, 0.0),
            JsonCoeff::Pair([re, im]) => Complex64::new(re, im),
        })
        .collect())
}

/// One `re` or `re,im` row per element; a non-numeric first row is a header.
fn parse_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| GdftError::Parse(e.to_string()))?;
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        let nums: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match (nums, fields.len()) {
            (Ok(v), 1) => out.push(Complex64::new(v[0], 0.0)),
            (Ok(v), 2) => out.push(Complex64::new(v[0], v[1])),
            (Err(_), _) if i == 0 => continue,
            _ => return Err(GdftError::Parse(format!("row {}: expected `re` or `re,im`", i + 1))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let a = parse_json("[1, [0.5, -2]]").unwrap();
        assert_eq!(a, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]);
        let b = parse_json(r#"{"coeffs": [[0, 1]]}"#).unwrap();
        assert_eq!(b, vec![Complex64::new(0.0, 1.0)]);
        assert!(parse_json("[1, ").is_err());
    }

    #[test]
    fn csv_forms() {
        let a = parse_csv("re,im\n1,0\n# skipped\n2.5\n0,-1\n").unwrap();
        assert_eq!(
            a,
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.5, 0.0), Complex64::new(0.0, -1.0)]
        );
        assert!(parse_csv("1\nx,y\n").is_err());
    }

    #[test]
    fn alpha_length_checked() {
        let g = load_group("cyclic:4").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, "1\n0\n0\n").unwrap();
        let err = load_alpha(p.to_str().unwrap(), &g).unwrap_err();
        assert!(matches!(err.root(), GdftError::DimensionMismatch(_)));
        let r = load_alpha("random:3", &g).unwrap();
        assert_eq!(r.coeffs(), GroupAlgebraElement::random(&g, 3).coeffs());
    }
}
