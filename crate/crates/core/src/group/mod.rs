//! Finite groups stored as dense multiplication tables.
//!
//! Element `0` is always the identity. Products follow `mult(a, b) = a·b`;
//! for permutation groups `a·b` is the composition "apply `b`, then `a`".

mod families;
mod lattice;
mod spec;
mod triple;

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{GdftError, Result};

pub use families::{
    alternating, cyclic, dihedral, direct_product, group_from_generators, group_from_generators_capped,
    group_from_named_family, heisenberg, quaternion8, special_linear2, symmetric, Family,
};
pub use lattice::{
    all_subgroups, coset_reps, normal_subgroups, quotient, subgroup_generated, CosetSide, QuotientMap,
    SEARCH_CAP,
};
pub(crate) use families::is_prime;
pub use spec::GroupSpec;
pub use triple::{find_forced_triple, find_triple, translate_cover, translate_cover_bound, Triple, TripleSearch};

/// Largest group `group_from_generators` will close by default.
pub const DEFAULT_ORDER_CAP: usize = 5000;

/// How a group was built; drives the choice of irrep construction.
#[derive(Debug, Clone)]
pub enum Construction {
    Generic,
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion8,
    Heisenberg(usize),
    SpecialLinear2(usize),
    DirectProduct(Arc<FiniteGroup>, Arc<FiniteGroup>),
}

#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    label: String,
    construction: Construction,
    perms: Option<Arc<Vec<Vec<usize>>>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table and validates the group axioms.
    pub fn from_table(table: Vec<Vec<usize>>, label: impl Into<String>) -> Result<Self> {
        let n = table.len();
        let mut mult = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(GdftError::Parse("multiplication table is not square".into()));
            }
            mult.extend(row.iter().map(|&x| x as u32));
        }
        let g = Self::from_flat(n, mult, label.into(), Construction::Generic, None)?;
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_flat(
        order: usize,
        mult: Vec<u32>,
        label: String,
        construction: Construction,
        perms: Option<Arc<Vec<Vec<usize>>>>,
    ) -> Result<Self> {
        if order == 0 || mult.len() != order * order {
            return Err(GdftError::Parse("empty or malformed multiplication table".into()));
        }
        if mult.iter().any(|&x| x as usize >= order) {
            return Err(GdftError::Parse("table entry out of range".into()));
        }
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mult[a * order + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(GdftError::Parse(format!("element {a} has no inverse")));
            }
        }
        Ok(FiniteGroup {
            order,
            mult,
            inv,
            label,
            construction,
            perms,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// Permutation images of element `g`, when the group came from permutations.
    pub fn permutation(&self, g: usize) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[g].as_slice())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_construction(mut self, c: Construction) -> Self {
        self.construction = c;
        self
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// `g·x·g⁻¹`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Greedy generating set: repeatedly adds the smallest element outside the
    /// subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = FixedBitSet::with_capacity(self.order);
        span.insert(0);
        while let Some(g) = (0..self.order).find(|&g| !span.contains(g)) {
            gens.push(g);
            span = lattice::closure_mask(self, &gens);
        }
        gens
    }

    /// Stable content hash of the multiplication table.
    pub fn table_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.order as u64).to_le_bytes());
        for x in &self.mult {
            h.update(x.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Checks the Latin-square, identity and inverse laws on all elements and
    /// associativity on all triples (order ≤ 256) or on 200 000 seeded random triples.
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        let bad = |msg: String| Err(GdftError::Parse(format!("{}: {msg}", self.label)));
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return bad(format!("element 0 is not an identity for {g}"));
            }
            if self.mul(g, self.inv(g)) != 0 || self.mul(self.inv(g), g) != 0 {
                return bad(format!("inverse law fails at {g}"));
            }
        }
        let mut seen = FixedBitSet::with_capacity(n);
        for a in 0..n {
            seen.clear();
            for b in 0..n {
                seen.insert(self.mul(a, b));
            }
            if seen.count_ones(..) != n {
                return bad(format!("row {a} is not a permutation"));
            }
            seen.clear();
            for b in 0..n {
                seen.insert(self.mul(b, a));
            }
            if seen.count_ones(..) != n {
                return bad(format!("column {a} is not a permutation"));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return bad(format!("associativity fails at ({a}, {b}, {c})"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0xA550C);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return bad(format!("associativity fails at ({a}, {b}, {c})"));
                }
            }
        }
        Ok(())
    }
}

/// A subgroup, stored as the sorted list of its elements in the parent.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<usize>,
    mask: FixedBitSet,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} of {})", self.elements.len(), self.parent.label())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Wraps an element set, checking the subgroup axioms.
    pub fn new(parent: &Arc<FiniteGroup>, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let s = Self::from_mask_unchecked(parent, {
            let mut m = FixedBitSet::with_capacity(parent.order());
            for e in elements {
                if e >= parent.order() {
                    return Err(GdftError::Parse(format!("element {e} out of range")));
                }
                m.insert(e);
            }
            m
        });
        if !s.contains(0) {
            return Err(GdftError::Parse("subgroup must contain the identity".into()));
        }
        for &a in &s.elements {
            if !s.contains(parent.inv(a)) || s.elements.iter().any(|&b| !s.contains(parent.mul(a, b))) {
                return Err(GdftError::Parse("element set is not closed".into()));
            }
        }
        Ok(s)
    }

    pub(crate) fn from_mask_unchecked(parent: &Arc<FiniteGroup>, mask: FixedBitSet) -> Self {
        let elements = mask.ones().collect();
        Subgroup {
            parent: Arc::clone(parent),
            elements,
            mask,
        }
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Self {
        let mut m = FixedBitSet::with_capacity(parent.order());
        m.insert_range(..);
        Self::from_mask_unchecked(parent, m)
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        let mut m = FixedBitSet::with_capacity(parent.order());
        m.insert(0);
        Self::from_mask_unchecked(parent, m)
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mask.contains(g)
    }

    pub fn is_proper(&self) -> bool {
        self.order() < self.parent.order()
    }

    /// Position of parent element `g` in [`Subgroup::elements`].
    pub fn local_index(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }

    pub fn intersection_order(&self, other: &Subgroup) -> usize {
        self.mask.intersection_count(&other.mask)
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        g.generators()
            .iter()
            .all(|&x| self.elements.iter().all(|&n| self.contains(g.conjugate(x, n))))
    }

    /// The subgroup as a standalone table group; element `i` is `elements()[i]`.
    pub fn to_group(&self) -> FiniteGroup {
        let n = self.order();
        let p = &self.parent;
        let mut mult = Vec::with_capacity(n * n);
        for &a in &self.elements {
            for &b in &self.elements {
                mult.push(self.local_index(p.mul(a, b)).expect("subgroup closed") as u32);
            }
        }
        let perms = p
            .perms
            .as_ref()
            .map(|all| Arc::new(self.elements.iter().map(|&e| all[e].clone()).collect()));
        let label = if n == p.order() {
            p.label().to_string()
        } else {
            format!("{}<{}", subgroup_label(n), p.label())
        };
        FiniteGroup::from_flat(n, mult, label, Construction::Generic, perms).expect("subgroup table is a group")
    }

    /// The same element set viewed inside a larger group that contains `self.parent()`
    /// as the subgroup `embedding`.
    pub fn embed(&self, embedding: &Subgroup) -> Subgroup {
        let mut m = FixedBitSet::with_capacity(embedding.parent.order());
        for &e in &self.elements {
            m.insert(embedding.elements[e]);
        }
        Subgroup::from_mask_unchecked(&embedding.parent, m)
    }

    /// Re-expresses `self` (a subgroup of the parent contained in `inside`) in
    /// the local coordinates of `inside.to_group()`, whose Arc is `local`.
    pub fn restrict_to(&self, inside: &Subgroup, local: &Arc<FiniteGroup>) -> Subgroup {
        let mut m = FixedBitSet::with_capacity(local.order());
        for &e in &self.elements {
            m.insert(inside.local_index(e).expect("subgroup not contained"));
        }
        Subgroup::from_mask_unchecked(local, m)
    }
}

fn subgroup_label(order: usize) -> String {
    format!("H{order}")
}
