//! Target block format for parent matrices and the column labeling that
//! places every `M_n^σ` into it.
//!
//! Level `i` of the format for `m = [H:N]` holds `c_i` blocks of size
//! `2^i × 2^i`, with `c_i = ⌈2m/4^i⌉` below the top level `⌈log₂ m⌉` and
//! `c_top = 2`. A source column of height `p` goes, top-aligned, to the next
//! free column of level `⌈log₂ p⌉`; each orbit `ℓ` starts from fresh counters,
//! so distinct orbits may share labels.

use std::collections::HashMap;

use crate::error::{GdftError, Result};
use crate::repr::CliffordData;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetFormat {
    pub m: usize,
    pub i_max: usize,
    /// Block count per level.
    pub counts: Vec<usize>,
}

pub(crate) fn ceil_log2(x: usize) -> usize {
    assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

pub fn build_target_format(m: usize) -> Result<TargetFormat> {
    if m == 0 {
        return Err(GdftError::DimensionMismatch("target format needs m ≥ 1".into()));
    }
    let i_max = ceil_log2(m);
    let counts = (0..=i_max)
        .map(|i| if i == i_max { 2 } else { (2 * m).div_ceil(1 << (2 * i)) })
        .collect();
    Ok(TargetFormat { m, i_max, counts })
}

impl TargetFormat {
    pub fn block_size(&self, level: usize) -> usize {
        1 << level
    }

    pub fn columns(&self, level: usize) -> usize {
        self.counts[level] << level
    }

    /// `r`: total number of entries over all blocks.
    pub fn total_entries(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, &c)| c << (2 * i)).sum()
    }

    /// Bound on the number of distinct labels a labeling can occupy: fewer
    /// than `2m/2^i` columns of height at most `2^i` per level.
    pub fn occupied_bound(&self) -> usize {
        2 * self.m * (self.i_max + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub level: usize,
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnPlacement {
    pub level: usize,
    pub block: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct Labeling {
    pub format: TargetFormat,
    /// Per irrep `σ` of `H` and copy `j < e_σ`: where its column sits.
    pub columns: Vec<Vec<ColumnPlacement>>,
    /// Column height `dim σ / d_σ` per `σ`.
    pub heights: Vec<usize>,
    /// Occupied coordinates, sorted; a label is an index into this list.
    pub occupied: Vec<Coord>,
    pub label_index: HashMap<Coord, usize>,
    /// Per label: the `(σ, i, j)` mapped onto it, at most one per orbit.
    pub sources: Vec<Vec<(usize, usize, usize)>>,
}

impl Labeling {
    pub fn coord(&self, sigma: usize, i: usize, j: usize) -> Coord {
        let c = self.columns[sigma][j];
        Coord {
            level: c.level,
            block: c.block,
            row: i,
            col: c.col,
        }
    }

    pub fn label(&self, sigma: usize, i: usize, j: usize) -> usize {
        self.label_index[&self.coord(sigma, i, j)]
    }

    pub fn r(&self) -> usize {
        self.format.total_entries()
    }
}

/// First-fit column assignment, scanning `σ` in id order and then `j`.
pub fn build_labeling(cd: &CliffordData, dims: &[usize], format: &TargetFormat) -> Result<Labeling> {
    let mut columns = vec![Vec::new(); dims.len()];
    let mut heights = vec![0; dims.len()];
    let mut used: HashMap<Coord, Vec<(usize, usize, usize)>> = HashMap::new();
    for part in &cd.parts {
        let mut next = vec![0usize; format.i_max + 1];
        let mut entries = 0;
        for &sigma in part {
            let sc = cd.sigma[sigma];
            let p = dims[sigma] / sc.d;
            heights[sigma] = p;
            let level = ceil_log2(p);
            if level > format.i_max {
                return Err(GdftError::Numerical(format!("column of height {p} exceeds the format")));
            }
            for j in 0..sc.e {
                let idx = next[level];
                if idx >= format.columns(level) {
                    return Err(GdftError::Numerical(format!("no free column at level {level}")));
                }
                next[level] += 1;
                let place = ColumnPlacement {
                    level,
                    block: idx >> level,
                    col: idx & ((1 << level) - 1),
                };
                columns[sigma].push(place);
                for i in 0..p {
                    let c = Coord {
                        level,
                        block: place.block,
                        row: i,
                        col: place.col,
                    };
                    used.entry(c).or_default().push((sigma, i, j));
                }
                entries += p;
            }
        }
        if entries != format.m {
            return Err(GdftError::Numerical(format!("orbit places {entries} entries, expected {}", format.m)));
        }
    }
    let mut occupied: Vec<Coord> = used.keys().copied().collect();
    occupied.sort_unstable();
    if occupied.len() > format.occupied_bound() {
        return Err(GdftError::Numerical(format!(
            "{} occupied labels exceed the bound {}",
            occupied.len(),
            format.occupied_bound()
        )));
    }
    let label_index: HashMap<Coord, usize> = occupied.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let sources = occupied.iter().map(|c| used[c].clone()).collect();
    Ok(Labeling {
        format: format.clone(),
        columns,
        heights,
        occupied,
        label_index,
        sources,
    })
}
