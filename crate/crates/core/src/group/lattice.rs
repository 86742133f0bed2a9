//! Subgroup lattice search, cosets and quotients.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{Construction, FiniteGroup, Subgroup};
use crate::error::{GdftError, Result};

/// Largest group order accepted by [`all_subgroups`].
pub const SEARCH_CAP: usize = 512;

/// Upper bound on the number of subgroups [`all_subgroups`] will enumerate.
const SUBGROUP_COUNT_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CosetSide {
    /// Cosets `x·H`.
    Left,
    /// Cosets `H·x`.
    Right,
}

/// Closure of `gens` under multiplication, as a membership mask.
pub(crate) fn closure_mask(g: &FiniteGroup, gens: &[usize]) -> FixedBitSet {
    let mut mask = FixedBitSet::with_capacity(g.order());
    mask.insert(0);
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !mask.put(y) {
                queue.push(y);
            }
        }
    }
    mask
}

pub fn subgroup_generated(g: &Arc<FiniteGroup>, gens: &[usize]) -> Subgroup {
    Subgroup::from_mask_unchecked(g, closure_mask(g, gens))
}

fn sort_subgroups(v: &mut [Subgroup]) {
    v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements().cmp(b.elements())));
}

/// Every subgroup of `g` (optionally only those of index ≤ `max_index`),
/// sorted by order and then by element list.
///
/// Cyclic-extension search: start from the cyclic subgroups and repeatedly
/// join each known subgroup with a cyclic subgroup it does not contain.
pub fn all_subgroups(g: &Arc<FiniteGroup>, max_index: Option<usize>) -> Result<Vec<Subgroup>> {
    let n = g.order();
    if n > SEARCH_CAP {
        return Err(GdftError::GroupTooLarge { order: n, cap: SEARCH_CAP });
    }
    // One generator per cyclic subgroup.
    let mut cyclic_gens = Vec::new();
    let mut cyclic_seen = HashSet::new();
    for x in 0..n {
        let m = closure_mask(g, &[x]);
        if cyclic_seen.insert(m) {
            cyclic_gens.push(x);
        }
    }
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut found: Vec<(FixedBitSet, Vec<usize>)> = Vec::new();
    for &c in &cyclic_gens {
        let m = closure_mask(g, &[c]);
        if seen.insert(m.clone()) {
            found.push((m, vec![c]));
        }
    }
    let mut head = 0;
    while head < found.len() {
        let (mask, gens) = found[head].clone();
        head += 1;
        if mask.count_ones(..) == n {
            continue;
        }
        for &c in &cyclic_gens {
            if mask.contains(c) {
                continue;
            }
            let mut gens2 = gens.clone();
            gens2.push(c);
            let m = closure_mask(g, &gens2);
            if !seen.contains(&m) {
                if found.len() >= SUBGROUP_COUNT_CAP {
                    return Err(GdftError::GroupTooLarge {
                        order: n,
                        cap: SEARCH_CAP,
                    });
                }
                seen.insert(m.clone());
                found.push((m, gens2));
            }
        }
    }
    let mut out: Vec<Subgroup> = found
        .into_iter()
        .map(|(m, _)| Subgroup::from_mask_unchecked(g, m))
        .filter(|s| max_index.map_or(true, |k| s.index() <= k))
        .collect();
    sort_subgroups(&mut out);
    Ok(out)
}

/// All normal subgroups, sorted by order and then by element list.
///
/// Normal subgroups are exactly the joins of normal closures of conjugacy
/// classes, so no general subgroup search (and no search cap) is needed.
pub fn normal_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let n = g.order();
    let gens = g.generators();
    let mut class_seen = FixedBitSet::with_capacity(n);
    let mut closures: Vec<FixedBitSet> = Vec::new();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    for x in 0..n {
        if class_seen.contains(x) {
            continue;
        }
        let mut class = vec![x];
        class_seen.insert(x);
        let mut i = 0;
        while i < class.len() {
            let y = class[i];
            i += 1;
            for &s in &gens {
                let z = g.conjugate(s, y);
                if !class_seen.put(z) {
                    class.push(z);
                }
            }
        }
        let m = closure_mask(g, &class);
        if seen.insert(m.clone()) {
            closures.push(m);
        }
    }
    let mut found: Vec<FixedBitSet> = closures.clone();
    let mut head = 0;
    while head < found.len() {
        let a = found[head].clone();
        head += 1;
        for c in &closures {
            if c.is_subset(&a) {
                continue;
            }
            // join of two normal subgroups is their product set A·C
            let mut m = FixedBitSet::with_capacity(n);
            for x in a.ones() {
                for y in c.ones() {
                    m.insert(g.mul(x, y));
                }
            }
            if seen.insert(m.clone()) {
                found.push(m);
            }
        }
    }
    let mut out: Vec<Subgroup> = found.into_iter().map(|m| Subgroup::from_mask_unchecked(g, m)).collect();
    sort_subgroups(&mut out);
    out
}

/// One representative per coset of `h`; each representative is the smallest
/// element of its coset and the list is increasing, so the identity comes first.
pub fn coset_reps(h: &Subgroup, side: CosetSide) -> Vec<usize> {
    let g = h.parent();
    let mut covered = FixedBitSet::with_capacity(g.order());
    let mut reps = Vec::with_capacity(h.index());
    for x in 0..g.order() {
        if covered.contains(x) {
            continue;
        }
        reps.push(x);
        for &e in h.elements() {
            covered.insert(match side {
                CosetSide::Left => g.mul(x, e),
                CosetSide::Right => g.mul(e, x),
            });
        }
    }
    reps
}

/// The quotient `G/N`; coset `i` is `reps[i]·N` and `reps` is increasing.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub group: Arc<FiniteGroup>,
    pub reps: Vec<usize>,
    pub coset_of: Vec<usize>,
}

impl QuotientMap {
    pub fn project(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// Preimage in `G` of a set of quotient elements.
    pub fn preimage(&self, parent: &Arc<FiniteGroup>, cosets: &[usize]) -> Subgroup {
        let mut m = FixedBitSet::with_capacity(parent.order());
        for g in 0..parent.order() {
            if cosets.contains(&self.coset_of[g]) {
                m.insert(g);
            }
        }
        Subgroup::from_mask_unchecked(parent, m)
    }
}

pub fn quotient(n: &Subgroup) -> Result<QuotientMap> {
    if !n.is_normal() {
        return Err(GdftError::NotNormal);
    }
    let g = n.parent();
    let reps = coset_reps(n, CosetSide::Left);
    let mut coset_of = vec![usize::MAX; g.order()];
    for (i, &r) in reps.iter().enumerate() {
        for &e in n.elements() {
            coset_of[g.mul(r, e)] = i;
        }
    }
    let q = reps.len();
    let mut mult = Vec::with_capacity(q * q);
    for &a in &reps {
        for &b in &reps {
            mult.push(coset_of[g.mul(a, b)] as u32);
        }
    }
    let group = FiniteGroup::from_flat(q, mult, format!("{}/N{}", g.label(), n.order()), Construction::Generic, None)?;
    Ok(QuotientMap {
        group: Arc::new(group),
        reps,
        coset_of,
    })
}
