//! JSON irrep cache keyed by the multiplication table hash.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Irrep, IrrepSet};
use crate::error::Result;
use crate::group::FiniteGroup;
use crate::linalg::{cplx, CMatrix};

#[derive(Serialize, Deserialize)]
struct CachedIrrep {
    dim: usize,
    /// Per element, row-major `[re, im]` entries.
    matrices: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    group_hash: String,
    order: usize,
    irreps: Vec<CachedIrrep>,
}

fn path(dir: &Path, g: &FiniteGroup) -> PathBuf {
    dir.join(format!("irreps-{}.json", g.table_hash()))
}

/// Loads the cached irreps of `g`, if present.
pub fn load(dir: &Path, g: &Arc<FiniteGroup>) -> Result<Option<IrrepSet>> {
    let p = path(dir, g);
    if !p.is_file() {
        return Ok(None);
    }
    let file: CacheFile = serde_json::from_str(&fs::read_to_string(&p)?)?;
    if file.order != g.order() || file.group_hash != g.table_hash() {
        log::warn!("ignoring stale irrep cache {}", p.display());
        return Ok(None);
    }
    let irreps = file
        .irreps
        .into_iter()
        .map(|c| {
            let mats = c
                .matrices
                .into_iter()
                .map(|m| CMatrix::from_row_iterator(c.dim, c.dim, m.into_iter().map(|[re, im]| cplx(re, im))))
                .collect();
            Irrep::new(0, mats)
        })
        .collect();
    Ok(Some(IrrepSet::from_ordered(g, irreps)))
}

pub fn store(dir: &Path, set: &IrrepSet) -> Result<()> {
    fs::create_dir_all(dir)?;
    let g = set.group();
    let file = CacheFile {
        group_hash: g.table_hash(),
        order: g.order(),
        irreps: set
            .irreps()
            .iter()
            .map(|r| CachedIrrep {
                dim: r.dim(),
                matrices: r
                    .matrices()
                    .iter()
                    .map(|m| m.transpose().iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
            })
            .collect(),
    };
    fs::write(path(dir, g), serde_json::to_string(&file)?)?;
    Ok(())
}
