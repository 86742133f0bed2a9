//! Subgroup triples `(N, H, K)` with `H ∩ K = N`, and translate covers.

use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::lattice::{all_subgroups, normal_subgroups, quotient};
use super::{FiniteGroup, Subgroup};
use crate::error::{GdftError, Result};

/// `N ◁ G` and proper subgroups `H, K ⊋ N` with `H ∩ K = N`, so `|HK| = |H||K|/|N|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub n: Subgroup,
    pub h: Subgroup,
    pub k: Subgroup,
}

impl Triple {
    pub fn product_size(&self) -> usize {
        self.h.order() * self.k.order() / self.n.order()
    }

    /// The product set `H·K` as a mask.
    pub fn product_mask(&self) -> FixedBitSet {
        let g = self.h.parent();
        let mut m = FixedBitSet::with_capacity(g.order());
        for &a in self.h.elements() {
            for &b in self.k.elements() {
                m.insert(g.mul(a, b));
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleSearch {
    BaseCase,
    PrimeIndexCase { n: Subgroup },
    TripleCase(Triple),
}

/// Normal subgroups `N` with `G/N` simple, i.e. no normal subgroup strictly
/// between `N` and `G`. Sorted by decreasing order, then by element list.
fn maximal_normal(normals: &[Subgroup]) -> Vec<Subgroup> {
    let g_order = normals.last().map_or(1, |s| s.parent().order());
    let mut out: Vec<Subgroup> = normals
        .iter()
        .filter(|n| n.order() < g_order)
        .filter(|n| {
            !normals
                .iter()
                .any(|m| m.order() > n.order() && m.order() < g_order && n.is_subset_of(m))
        })
        .cloned()
        .collect();
    out.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.elements().cmp(b.elements())));
    out
}

/// Best pair `H, K ⊋ N` (proper in `G`) with `H ∩ K = N`, searched in `G/N`.
fn best_pair(n: &Subgroup) -> Result<Option<(Subgroup, Subgroup)>> {
    let g = n.parent();
    let q = quotient(n)?;
    let subs = all_subgroups(&q.group, None)?;
    let qn = q.group.order();
    let candidates: Vec<&Subgroup> = subs.iter().filter(|s| s.order() > 1 && s.order() < qn).collect();
    let mut best: Option<((usize, usize), Subgroup, Subgroup)> = None;
    for (i, a) in candidates.iter().enumerate() {
        for b in &candidates[..=i] {
            // candidates are sorted by order, so |a| ≥ |b|
            if a.intersection_order(b) != 1 {
                continue;
            }
            let score = (a.order() * b.order(), b.order());
            let better = match &best {
                None => true,
                Some((s, bh, bk)) => {
                    score > *s || (score == *s && {
                        let h = q.preimage(g, a.elements());
                        let k = q.preimage(g, b.elements());
                        (h.elements(), k.elements()) < (bh.elements(), bk.elements())
                    })
                }
            };
            if better {
                best = Some((score, q.preimage(g, a.elements()), q.preimage(g, b.elements())));
            }
        }
    }
    Ok(best.map(|(_, h, k)| (h, k)))
}

/// Classifies `G` for the recursive transform.
///
/// Among normal subgroups `N` with `G/N` simple, one with a non-abelian
/// quotient is preferred (largest such `N`); it yields a triple maximizing
/// `|H||K|/|N|`, ties broken by larger `min(|H|, |K|)` and then by element lists,
/// with `|H| ≥ |K|`. When every such quotient is of prime order the largest
/// such `N` is returned as a prime-index case.
pub fn find_triple(g: &Arc<FiniteGroup>) -> Result<TripleSearch> {
    if g.order() == 1 {
        return Ok(TripleSearch::BaseCase);
    }
    let normals = normal_subgroups(g);
    let maximal = maximal_normal(&normals);
    if let Some(n) = maximal.iter().find(|n| !super::families::is_prime(n.index())) {
        return match best_pair(n)? {
            Some((h, k)) => Ok(TripleSearch::TripleCase(Triple { n: n.clone(), h, k })),
            None => Err(GdftError::NoTriple { order: g.order() }),
        };
    }
    let n = maximal.into_iter().next().expect("nontrivial group has a maximal normal subgroup");
    Ok(TripleSearch::PrimeIndexCase { n })
}

/// A triple for `G` even when `find_triple` reports a prime-index case: the
/// largest proper normal `N` admitting a pair is used.
pub fn find_forced_triple(g: &Arc<FiniteGroup>) -> Result<Triple> {
    if let TripleSearch::TripleCase(t) = find_triple(g)? {
        return Ok(t);
    }
    let mut normals: Vec<Subgroup> = normal_subgroups(g).into_iter().filter(|n| n.is_proper()).collect();
    normals.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.elements().cmp(b.elements())));
    for n in normals {
        if let Some((h, k)) = best_pair(&n)? {
            return Ok(Triple { n, h, k });
        }
    }
    Err(GdftError::NoTriple { order: g.order() })
}

/// Greedy cover of `G` by right translates `S·g`: each step takes the `g`
/// covering the most new elements, the smallest such `g` on ties.
pub fn translate_cover(g: &FiniteGroup, support: &FixedBitSet) -> Vec<usize> {
    let n = g.order();
    let s: Vec<usize> = support.ones().collect();
    assert!(!s.is_empty(), "translate cover of an empty set");
    let mut covered = FixedBitSet::with_capacity(n);
    let mut out = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let (mut best_g, mut best_gain) = (0, 0);
        for t in 0..n {
            let gain = s.iter().filter(|&&x| !covered.contains(g.mul(x, t))).count();
            if gain > best_gain {
                best_gain = gain;
                best_g = t;
                if gain == s.len() {
                    break;
                }
            }
        }
        for &x in &s {
            covered.insert(g.mul(x, best_g));
        }
        remaining -= best_gain;
        out.push(best_g);
    }
    out
}

/// `⌈(|G|/|S|)(ln|G| + 1)⌉`.
pub fn translate_cover_bound(group_order: usize, support_size: usize) -> usize {
    let n = group_order as f64;
    ((n / support_size as f64) * (n.ln() + 1.0)).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{alternating, cyclic, direct_product, special_linear2, symmetric};

    fn check_triple(t: &Triple) {
        let g = t.h.parent();
        assert!(t.n.is_normal());
        assert!(t.n.is_subset_of(&t.h) && t.n.is_subset_of(&t.k));
        assert!(t.h.is_proper() && t.k.is_proper());
        let inter: Vec<usize> = t.h.elements().iter().copied().filter(|&x| t.k.contains(x)).collect();
        assert_eq!(inter, t.n.elements());
        assert_eq!(t.product_mask().count_ones(..), t.product_size());
        assert!(t.h.order() >= t.k.order());
        assert!(g.order() % t.h.order() == 0);
    }

    #[test]
    fn base_and_prime_cases() {
        let g = Arc::new(cyclic(1).unwrap());
        assert_eq!(find_triple(&g).unwrap(), TripleSearch::BaseCase);
        let s4 = Arc::new(symmetric(4).unwrap());
        match find_triple(&s4).unwrap() {
            TripleSearch::PrimeIndexCase { n } => assert_eq!(n.order(), 12),
            other => panic!("{other:?}"),
        }
        let c7 = Arc::new(cyclic(7).unwrap());
        match find_triple(&c7).unwrap() {
            TripleSearch::PrimeIndexCase { n } => assert_eq!(n.order(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn a5_triple() {
        let g = Arc::new(alternating(5).unwrap());
        let TripleSearch::TripleCase(t) = find_triple(&g).unwrap() else { panic!() };
        check_triple(&t);
        assert_eq!((t.n.order(), t.h.order(), t.k.order()), (1, 12, 5));
        assert_eq!(t.product_size(), 60);
        assert_eq!(translate_cover(&g, &t.product_mask()), vec![0]);
    }

    #[test]
    fn a5_has_no_dihedral_by_s3_factorization() {
        let g = Arc::new(alternating(5).unwrap());
        let subs = all_subgroups(&g, None).unwrap();
        for a in subs.iter().filter(|s| s.order() == 10) {
            for b in subs.iter().filter(|s| s.order() == 6) {
                assert!(a.intersection_order(b) > 1);
            }
        }
    }

    #[test]
    fn c2_times_a5_triple() {
        let g = Arc::new(direct_product(&Arc::new(cyclic(2).unwrap()), &Arc::new(alternating(5).unwrap())).unwrap());
        let TripleSearch::TripleCase(t) = find_triple(&g).unwrap() else { panic!() };
        check_triple(&t);
        assert_eq!((t.n.order(), t.h.order(), t.k.order()), (2, 24, 10));
        assert_eq!(t.product_size(), 120);
        // N is the C2 factor: elements (1, e) have index 1
        assert_eq!(t.n.elements(), &[0, 1]);
    }

    #[test]
    fn sl25_triple() {
        let g = Arc::new(special_linear2(5).unwrap());
        let TripleSearch::TripleCase(t) = find_triple(&g).unwrap() else { panic!() };
        check_triple(&t);
        assert_eq!((t.n.order(), t.h.order(), t.k.order()), (2, 24, 10));
    }

    #[test]
    fn forced_triple() {
        let s4 = Arc::new(symmetric(4).unwrap());
        let t = find_forced_triple(&s4).unwrap();
        check_triple(&t);
        assert!(find_forced_triple(&Arc::new(cyclic(5).unwrap())).is_err());
        let c6 = Arc::new(cyclic(6).unwrap());
        let t = find_forced_triple(&c6).unwrap();
        check_triple(&t);
        assert_eq!(t.product_size(), 6);
    }

    #[test]
    fn covers() {
        let c6 = cyclic(6).unwrap();
        let mut s = FixedBitSet::with_capacity(6);
        s.insert_range(0..3);
        assert_eq!(translate_cover(&c6, &s).len(), 2);
        let mut all = FixedBitSet::with_capacity(6);
        all.insert_range(..);
        assert_eq!(translate_cover(&c6, &all), vec![0]);
    }

    proptest::proptest! {
        #[test]
        fn cover_is_exact_and_bounded(bits in proptest::collection::vec(proptest::bool::ANY, 24)) {
            let g = symmetric(4).unwrap();
            let mut s = FixedBitSet::with_capacity(24);
            for (i, &b) in bits.iter().enumerate() {
                if b { s.insert(i); }
            }
            s.insert(0);
            let cover = translate_cover(&g, &s);
            let mut u = FixedBitSet::with_capacity(24);
            for &t in &cover {
                for x in s.ones() { u.insert(g.mul(x, t)); }
            }
            proptest::prop_assert_eq!(u.count_ones(..), 24);
            proptest::prop_assert!(cover.len() <= translate_cover_bound(24, s.count_ones(..)));
        }
    }
}
