//! Serializable group descriptions.
//!
//! JSON forms:
//! * `{"type":"named","family":"dihedral","n":6}`
//! * `{"type":"named","family":"direct_product","factors":[<spec>, <spec>]}`
//! * `{"type":"permutation","degree":5,"generators":[[1,2,3,4,0],[1,0,2,3,4]]}`
//! * `{"type":"table","table":[[0,1],[1,0]]}`
//!
//! Short form used on the command line: `family:n`, with `*` between
//! factors of a direct product (`cyclic:2*alternating:5`).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::families::{direct_product, group_from_generators, group_from_named_family, Family};
use super::FiniteGroup;
use crate::error::{GdftError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Named {
        family: Family,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factors: Option<Vec<GroupSpec>>,
    },
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Table {
        table: Vec<Vec<usize>>,
    },
}

impl GroupSpec {
    pub fn named(family: Family, n: i64) -> Self {
        GroupSpec::Named {
            family,
            n: Some(n),
            factors: None,
        }
    }

    pub fn product(a: GroupSpec, b: GroupSpec) -> Self {
        GroupSpec::Named {
            family: Family::DirectProduct,
            n: None,
            factors: Some(vec![a, b]),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Named {
                family: Family::DirectProduct,
                factors,
                n,
            } => {
                let factors = factors.as_deref().unwrap_or_default();
                if factors.len() < 2 {
                    return Err(GdftError::BadParameter {
                        family: "direct_product".into(),
                        param: n.unwrap_or(factors.len() as i64),
                    });
                }
                let mut acc = Arc::new(factors[0].build()?);
                for f in &factors[1..] {
                    acc = Arc::new(direct_product(&acc, &Arc::new(f.build()?))?);
                }
                Ok(Arc::try_unwrap(acc).unwrap_or_else(|a| (*a).clone()))
            }
            GroupSpec::Named { family, n, .. } => group_from_named_family(*family, n.unwrap_or(0)),
            GroupSpec::Permutation { degree, generators } => group_from_generators(*degree, generators),
            GroupSpec::Table { table } => FiniteGroup::from_table(table.clone(), "table"),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GdftError::Parse(format!("group spec: {e}")))
    }

    /// Parses `family:n[*family:n...]`.
    pub fn parse_short(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for factor in s.split('*') {
            let (name, param) = factor
                .trim()
                .split_once(':')
                .ok_or_else(|| GdftError::Parse(format!("expected family:n, got {factor:?}")))?;
            let n: i64 = param
                .parse()
                .map_err(|_| GdftError::Parse(format!("bad parameter {param:?}")))?;
            parts.push(GroupSpec::named(name.parse()?, n));
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            GroupSpec::Named {
                family: Family::DirectProduct,
                n: None,
                factors: Some(parts),
            }
        })
    }

    /// A path to a JSON spec if such a file exists, otherwise the short form.
    pub fn parse_arg(arg: &str) -> Result<Self> {
        let p = Path::new(arg);
        if p.is_file() {
            Self::from_json(&std::fs::read_to_string(p)?)
        } else {
            Self::parse_short(arg)
        }
    }
}
