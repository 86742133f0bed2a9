//! Named lists of groups used by the benchmark and the test suites.

use crate::error::{GdftError, Result};
use crate::group::{Family, GroupSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub spec: GroupSpec,
}

fn entry(name: impl Into<String>, family: Family, n: i64) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        spec: GroupSpec::named(family, n),
    }
}

fn product(name: &str, a: GroupSpec, b: GroupSpec) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        spec: GroupSpec::product(a, b),
    }
}

pub const CATALOG_NAMES: &[&str] = &["smoke", "cyclic2k", "small", "acceptance", "empty"];

/// Groups of the named catalog, in a fixed order.
///
/// * `smoke`: S3, D6, Q8
/// * `cyclic2k`: C32 through C512
/// * `small`: the fixed non-family groups of `acceptance`
/// * `acceptance`: C1..C128, D1..D64 (orders up to 128) and `small`
/// * `empty`: nothing
pub fn catalog(name: &str) -> Result<Vec<CatalogEntry>> {
    Ok(match name {
        "smoke" => vec![
            entry("S3", Family::Symmetric, 3),
            entry("D6", Family::Dihedral, 6),
            entry("Q8", Family::Quaternion8, 8),
        ],
        "cyclic2k" => (5..=9).map(|k| entry(format!("C{}", 1 << k), Family::Cyclic, 1 << k)).collect(),
        "small" => small(),
        "acceptance" => {
            let mut v: Vec<CatalogEntry> = (1..=128).map(|n| entry(format!("C{n}"), Family::Cyclic, n)).collect();
            v.extend((1..=64).map(|n| entry(format!("D{n}"), Family::Dihedral, n)));
            v.extend(small());
            v
        }
        "empty" => Vec::new(),
        other => {
            return Err(GdftError::Parse(format!(
                "unknown catalog `{other}` (expected one of {})",
                CATALOG_NAMES.join(", ")
            )))
        }
    })
}

fn small() -> Vec<CatalogEntry> {
    vec![
        entry("S3", Family::Symmetric, 3),
        entry("S4", Family::Symmetric, 4),
        entry("S5", Family::Symmetric, 5),
        entry("A4", Family::Alternating, 4),
        entry("A5", Family::Alternating, 5),
        entry("Q8", Family::Quaternion8, 8),
        entry("Heis3", Family::HeisenbergP, 3),
        entry("SL(2,5)", Family::SpecialLinear2, 5),
        product(
            "C2xA5",
            GroupSpec::named(Family::Cyclic, 2),
            GroupSpec::named(Family::Alternating, 5),
        ),
        product(
            "C3xS3",
            GroupSpec::named(Family::Cyclic, 3),
            GroupSpec::named(Family::Symmetric, 3),
        ),
    ]
}
