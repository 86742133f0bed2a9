//! Orbits of a group `H` on the irreps of a normal subgroup `N`, and the
//! resulting partition of the irreps of `H`.

use super::{IrrepSet, RestrictionPlan};
use crate::error::{GdftError, Result};
use crate::group::Subgroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaClifford {
    /// Orbit of the irreps of `N` appearing in the restriction.
    pub orbit: usize,
    /// Multiplicity of each irrep of the orbit.
    pub e: usize,
    /// Common dimension of the irreps in the orbit.
    pub d: usize,
}

#[derive(Debug, Clone)]
pub struct CliffordData {
    /// Orbits of irreps of `N` (ids), each sorted, ordered by smallest member.
    pub orbits: Vec<Vec<usize>>,
    pub orbit_of: Vec<usize>,
    pub sigma: Vec<SigmaClifford>,
    /// `S_ℓ`: the irreps of `H` whose restriction lies over orbit `ℓ`.
    pub parts: Vec<Vec<usize>>,
    /// `[H : N]`.
    pub index: usize,
}

/// Clifford data for `N ◁ H`. `n` is a subgroup of the group of `irr_h`,
/// `irr_n` is indexed by the local element order of `n`, and `plan` restricts
/// `irr_h` to `n`.
pub fn clifford_data(n: &Subgroup, irr_h: &IrrepSet, irr_n: &IrrepSet, plan: &RestrictionPlan) -> Result<CliffordData> {
    if !n.is_normal() {
        return Err(GdftError::NotNormal);
    }
    let h = n.parent();
    let k = irr_n.len();
    // union-find over the action of generators of H on characters of N
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for s in h.generators() {
        let perm: Vec<usize> = n
            .elements()
            .iter()
            .map(|&x| n.local_index(h.conjugate(s, x)).expect("N normal"))
            .collect();
        for lam in irr_n.irreps() {
            let chi: Vec<_> = perm.iter().map(|&j| lam.character()[j]).collect();
            let image = irr_n
                .find_by_character(&chi)
                .ok_or_else(|| GdftError::Numerical("conjugate character is not an irrep of N".into()))?;
            let (a, b) = (find(&mut parent, lam.id()), find(&mut parent, image));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut orbit_of = vec![usize::MAX; k];
    for lam in 0..k {
        let r = find(&mut parent, lam);
        if orbit_of[r] == usize::MAX {
            orbit_of[r] = orbits.len();
            orbits.push(Vec::new());
        }
        let o = orbit_of[r];
        orbit_of[lam] = o;
        orbits[o].push(lam);
    }

    let index = h.order() / n.order();
    let mut sigma = Vec::with_capacity(irr_h.len());
    let mut parts = vec![Vec::new(); orbits.len()];
    for (sid, block) in plan.blocks.iter().enumerate() {
        let o = orbit_of[block.layout[0].irrep];
        if block.layout.iter().any(|e| orbit_of[e.irrep] != o) {
            return Err(GdftError::Numerical(format!("restriction of irrep {sid} meets two orbits")));
        }
        let e = block.multiplicity(orbits[o][0]);
        if orbits[o].iter().any(|&lam| block.multiplicity(lam) != e) {
            return Err(GdftError::Numerical(format!("irrep {sid} has unequal multiplicities on its orbit")));
        }
        let width = orbits[o].len();
        if block.layout.iter().enumerate().any(|(i, en)| en.irrep != orbits[o][i % width]) {
            return Err(GdftError::Numerical(format!("irrep {sid}: layout is not copy-major over its orbit")));
        }
        let d = irr_n.get(orbits[o][0]).dim();
        let dim = irr_h.get(sid).dim();
        if dim != d * e * orbits[o].len() {
            return Err(GdftError::Numerical(format!("irrep {sid}: dim {dim} ≠ d·e·|O|")));
        }
        sigma.push(SigmaClifford { orbit: o, e, d });
        parts[o].push(sid);
    }
    for (o, part) in parts.iter().enumerate() {
        let s: usize = part.iter().map(|&sid| sigma[sid].e * sigma[sid].e * orbits[o].len()).sum();
        if s != index {
            return Err(GdftError::Numerical(format!("orbit {o}: Σ dim·e/d = {s} ≠ [H:N] = {index}")));
        }
    }
    Ok(CliffordData {
        orbits,
        orbit_of,
        sigma,
        parts,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{alternating, normal_subgroups, special_linear2, symmetric, FiniteGroup};
    use crate::repr::{compute_irreps, restriction_plan, IrrepOptions};
    use std::sync::Arc;

    fn data(g: FiniteGroup, n_order: usize) -> (CliffordData, Arc<IrrepSet>) {
        let g = Arc::new(g);
        let irr_h = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let n = normal_subgroups(&g).into_iter().find(|s| s.order() == n_order).unwrap();
        let irr_n = Arc::new(compute_irreps(&Arc::new(n.to_group()), &IrrepOptions::default()).unwrap());
        let plan = restriction_plan(&irr_h, &n, &irr_n).unwrap();
        (clifford_data(&n, &irr_h, &irr_n, &plan).unwrap(), irr_h)
    }

    #[test]
    fn s3_over_c3() {
        let (c, _) = data(symmetric(3).unwrap(), 3);
        assert_eq!(c.orbits, vec![vec![0], vec![1, 2]]);
        assert_eq!(c.parts, vec![vec![0, 1], vec![2]]);
        assert!(c.sigma.iter().all(|s| s.e == 1 && s.d == 1));
        assert_eq!(c.index, 2);
    }

    #[test]
    fn trivial_normal_subgroup() {
        let (c, irr) = data(alternating(5).unwrap(), 1);
        assert_eq!(c.orbits.len(), 1);
        for (sid, s) in c.sigma.iter().enumerate() {
            assert_eq!((s.e, s.d), (irr.get(sid).dim(), 1));
        }
    }

    #[test]
    fn dimension_squares_partition() {
        for (g, n) in [(symmetric(4).unwrap(), 4), (symmetric(4).unwrap(), 12), (special_linear2(5).unwrap(), 2)] {
            let order = g.order();
            let (c, irr) = data(g, n);
            let total: usize = c.parts.iter().flatten().map(|&s| irr.get(s).dim().pow(2)).sum();
            assert_eq!(total, order);
        }
    }
}
